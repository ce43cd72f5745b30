//! Deterministic shortest-path routing tables.

use super::topology::Topology;
use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct RoutingTable {
    pub p: usize,
    /// next_port[src * p + dst]: network output port (1-based) of the first
    /// hop from src toward dst; 0 when src == dst (local delivery).
    pub next_port: Vec<u8>,
    /// dist[src * p + dst]: shortest hop count.
    pub dist: Vec<u32>,
}

impl RoutingTable {
    #[inline]
    pub fn port(&self, src: u32, dst: u32) -> u8 {
        self.next_port[src as usize * self.p + dst as usize]
    }

    #[inline]
    pub fn hops(&self, src: u32, dst: u32) -> u32 {
        self.dist[src as usize * self.p + dst as usize]
    }
}

/// Builds the table with one backward BFS per destination. Among equal-length
/// first hops the lowest output port wins, so the table is a pure function of
/// the topology.
pub fn build_routing_table(topo: &Topology) -> RoutingTable {
    let p = topo.p;
    let mut next_port = vec![0u8; p * p];
    let mut dist = vec![0u32; p * p];
    let mut d = vec![u32::MAX; p];
    let mut queue = VecDeque::new();

    for dst in 0..p {
        d.fill(u32::MAX);
        d[dst] = 0;
        queue.clear();
        queue.push_back(dst as u32);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &topo.in_links[u as usize] {
                if d[w as usize] == u32::MAX {
                    d[w as usize] = d[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        for src in 0..p {
            dist[src * p + dst] = d[src];
            if src == dst {
                continue;
            }
            let want = d[src] - 1;
            let port = topo.succ[src]
                .iter()
                .position(|&v| d[v as usize] == want)
                .expect("connected topology has a next hop")
                + 1;
            next_port[src * p + dst] = port as u8;
        }
    }

    RoutingTable { p, next_port, dist }
}
