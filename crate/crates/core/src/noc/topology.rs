//! Directed degree-d topologies on p routers.
//!
//! Both families keep in-degree and out-degree equal to `d` on every node for
//! any p, counting parallel links and self loops. Output port 0 of a router
//! is the local port toward its processing element; network output port `j`
//! (1-based) carries the link to `succ[j - 1]`.

use crate::error::{Error, Result};
use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NocKind {
    /// Successors of node i are (-d*i - j) mod p for j = 1..=d.
    Kautz,
    /// Successors of node i are (d*i + j) mod p for j = 0..d.
    DeBruijn,
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub kind: NocKind,
    pub p: usize,
    pub d: usize,
    /// succ[i][j] is the head of the link on output port j + 1 of node i.
    pub succ: Vec<Vec<u32>>,
    /// in_links[v] lists the incoming links of v as (tail node, tail output
    /// port), sorted; the position in this list is the input index used by
    /// the router arbitration.
    pub in_links: Vec<Vec<(u32, u8)>>,
    pub self_loops: usize,
    pub diameter: u32,
}

pub fn gen_topology(kind: NocKind, p: usize, d: usize) -> Result<Topology> {
    if p == 0 {
        return Err(Error::Config("topology needs at least one node".into()));
    }
    if d == 0 {
        return Err(Error::Config("topology needs degree at least one".into()));
    }
    let pm = p as i64;
    let dm = d as i64;
    let mut succ = vec![Vec::with_capacity(d); p];
    for i in 0..pm {
        for j in 0..dm {
            let t = match kind {
                NocKind::Kautz => (-dm * i - (j + 1)).rem_euclid(pm),
                NocKind::DeBruijn => (dm * i + j).rem_euclid(pm),
            };
            succ[i as usize].push(t as u32);
        }
    }

    let mut in_links = vec![Vec::new(); p];
    let mut self_loops = 0;
    for (i, row) in succ.iter().enumerate() {
        for (j, &t) in row.iter().enumerate() {
            if t as usize == i {
                self_loops += 1;
            }
            in_links[t as usize].push((i as u32, (j + 1) as u8));
        }
    }
    for links in &mut in_links {
        links.sort_unstable();
    }

    let diameter = check_connected_diameter(p, &succ)?;
    Ok(Topology {
        kind,
        p,
        d,
        succ,
        in_links,
        self_loops,
        diameter,
    })
}

/// BFS from every node over forward links; errors on the first unreachable
/// pair and otherwise returns the largest finite distance.
fn check_connected_diameter(p: usize, succ: &[Vec<u32>]) -> Result<u32> {
    let mut diameter = 0;
    let mut dist = vec![u32::MAX; p];
    let mut queue = VecDeque::new();
    for s in 0..p {
        dist.fill(u32::MAX);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s as u32);
        while let Some(u) = queue.pop_front() {
            for &v in &succ[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (t, &dv) in dist.iter().enumerate() {
            if dv == u32::MAX {
                return Err(Error::Unreachable { from: s, to: t });
            }
            diameter = diameter.max(dv);
        }
    }
    Ok(diameter)
}
