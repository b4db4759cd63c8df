//! Exact s-t max flow (Dinic) over real capacities.

use std::collections::VecDeque;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    n: usize,
    pub source: usize,
    pub sink: usize,
    to: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    /// `n` nodes including source and sink.
    pub fn new(n: usize, source: usize, sink: usize) -> Self {
        assert!(source < n && sink < n && source != sink);
        Self { n, source, sink, to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Edge `u -> v` with capacity `cap` and `v -> u` with `rev_cap`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64, rev_cap: f64) {
        assert!(cap >= 0.0 && rev_cap >= 0.0, "capacities must be non-negative");
        assert!(cap.is_finite() && rev_cap.is_finite(), "capacities must be finite");
        let e = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.to.push(u);
        self.cap.push(rev_cap);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
    }

    /// Total capacity of edges leaving the `source_side` set.
    pub fn cut_capacity(&self, source_side: &[bool]) -> f64 {
        let mut total = 0.0;
        for u in 0..self.n {
            if !source_side[u] {
                continue;
            }
            for &e in &self.adj[u] {
                if !source_side[self.to[e]] {
                    total += self.cap[e];
                }
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    pub value: f64,
    /// `true` for nodes on the source side of the cut.
    pub source_side: Vec<bool>,
}

struct Dinic<'a> {
    net: &'a FlowNetwork,
    cap: Vec<f64>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic<'_> {
    fn bfs(&mut self) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[self.net.source] = 0;
        queue.push_back(self.net.source);
        while let Some(u) = queue.pop_front() {
            for &e in &self.net.adj[u] {
                let v = self.net.to[e];
                if self.cap[e] > EPS && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[self.net.sink] >= 0
    }

    /// Push a blocking flow through the current level graph.
    fn blocking_flow(&mut self) -> f64 {
        let (s, t) = (self.net.source, self.net.sink);
        self.next.iter_mut().for_each(|i| *i = 0);
        let mut total = 0.0;
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let push = path.iter().map(|&e| self.cap[e]).fold(f64::INFINITY, f64::min);
                let mut retreat = None;
                for (k, &e) in path.iter().enumerate() {
                    self.cap[e] -= push;
                    self.cap[e ^ 1] += push;
                    if retreat.is_none() && self.cap[e] <= EPS {
                        retreat = Some(k);
                    }
                }
                total += push;
                // resume from the tail of the first saturated edge
                let k = retreat.expect("bottleneck edge saturates");
                path.truncate(k);
                u = path.last().map_or(s, |&e| self.net.to[e]);
                continue;
            }
            let adj = &self.net.adj[u];
            let mut advanced = false;
            while self.next[u] < adj.len() {
                let e = adj[self.next[u]];
                let v = self.net.to[e];
                if self.cap[e] > EPS && self.level[v] == self.level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                self.next[u] += 1;
            }
            if advanced {
                continue;
            }
            // dead end: drop u from the level graph and back up
            self.level[u] = -1;
            match path.pop() {
                Some(e) => {
                    u = self.net.to[e ^ 1];
                    self.next[u] += 1;
                }
                None => return total,
            }
        }
    }
}

/// Maximum flow value and a minimum cut achieving it. Panics if the cut
/// capacity disagrees with the flow value, which would indicate a solver bug.
pub fn max_flow(net: &FlowNetwork) -> MinCut {
    let mut d = Dinic { net, cap: net.cap.clone(), level: vec![-1; net.n], next: vec![0; net.n] };
    let mut value = 0.0;
    while d.bfs() {
        value += d.blocking_flow();
    }
    // after the last bfs, level >= 0 marks nodes reachable in the residual
    d.bfs();
    let source_side: Vec<bool> = d.level.iter().map(|&l| l >= 0).collect();
    let cut = net.cut_capacity(&source_side);
    let tol = 1e-6 * value.abs().max(1.0);
    assert!((cut - value).abs() <= tol, "max-flow {value} != cut capacity {cut}");
    MinCut { value, source_side }
}
