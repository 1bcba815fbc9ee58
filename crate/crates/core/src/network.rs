//! Directed multigraph topology, o-d path enumeration, incidence matrices
//! and min-cut capacity.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::NetworkError;
use crate::routing::PathPreference;

/// Stand-in for an infinite link capacity inside max-flow computations.
pub const INFINITE_CAPACITY: f64 = 1e18;

/// Default limit on the number of enumerated o-d paths.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// A directed multigraph with a distinguished origin and destination.
///
/// Nodes and links are addressed by position; the string ids are kept for
/// I/O. Parallel links are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<String>,
    links: Vec<Link>,
    origin: usize,
    destination: usize,
}

impl Topology {
    /// Builds a topology from node ids and `(link id, tail id, head id)` triples.
    ///
    /// Only referential integrity is checked here; structural admissibility
    /// is reported by [`Topology::validate`].
    pub fn new<S: AsRef<str>>(
        nodes: &[S],
        links: &[(S, S, S)],
        origin: &str,
        destination: &str,
    ) -> Result<Self, NetworkError> {
        let nodes: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.as_str(), i).is_some() {
                return Err(NetworkError::DuplicateNode(n.clone()));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| NetworkError::UnknownNode(name.to_string()))
        };
        let mut seen = HashMap::new();
        let mut out = Vec::with_capacity(links.len());
        for (id, tail, head) in links {
            let id = id.as_ref().to_string();
            if seen.insert(id.clone(), ()).is_some() {
                return Err(NetworkError::DuplicateLink(id));
            }
            out.push(Link {
                id,
                tail: lookup(tail.as_ref())?,
                head: lookup(head.as_ref())?,
            });
        }
        let origin = lookup(origin)?;
        let destination = lookup(destination)?;
        if origin == destination {
            return Err(NetworkError::OriginIsDestination);
        }
        Ok(Self {
            nodes,
            links: out,
            origin,
            destination,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    pub fn link_ids(&self) -> Vec<&str> {
        self.links.iter().map(|l| l.id.as_str()).collect()
    }

    /// Reports every structural violation; an empty report means the
    /// topology is admissible.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with_cap(DEFAULT_PATH_CAP)
    }

    pub fn validate_with_cap(&self, path_cap: usize) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, l) in self.links.iter().enumerate() {
            if l.tail == l.head {
                violations.push(Violation::SelfLoop { link: i });
            }
        }
        if !self.reachable_from(self.origin)[self.destination] {
            violations.push(Violation::DestinationUnreachable);
            return ValidationReport { violations };
        }
        match simple_paths(self, path_cap) {
            Ok(paths) => {
                let mut used = vec![false; self.links.len()];
                for p in &paths {
                    for &i in p {
                        used[i] = true;
                    }
                }
                for (i, u) in used.iter().enumerate() {
                    // self-loops are already reported and can never be on a simple path
                    if !u && self.links[i].tail != self.links[i].head {
                        violations.push(Violation::LinkOffAllPaths { link: i });
                    }
                }
            }
            Err(_) => violations.push(Violation::TooManyPaths { cap: path_cap }),
        }
        ValidationReport { violations }
    }

    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for l in self.links.iter().filter(|l| l.tail == v) {
                if !seen[l.head] {
                    seen[l.head] = true;
                    queue.push_back(l.head);
                }
            }
        }
        seen
    }

    /// Node-link incidence matrix `B` (rows = nodes, columns = links):
    /// `+1` at the tail, `-1` at the head.
    pub fn node_link_incidence(&self) -> NodeLinkIncidence {
        let mut b = vec![vec![0i8; self.links.len()]; self.nodes.len()];
        for (i, l) in self.links.iter().enumerate() {
            b[l.tail][i] += 1;
            b[l.head][i] -= 1;
        }
        NodeLinkIncidence { b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { link: usize },
    DestinationUnreachable,
    LinkOffAllPaths { link: usize },
    TooManyPaths { cap: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { link } => write!(f, "link #{link} is a self-loop"),
            Violation::DestinationUnreachable => write!(f, "destination unreachable from origin"),
            Violation::LinkOffAllPaths { link } => write!(f, "link #{link} off all paths"),
            Violation::TooManyPaths { cap } => write!(f, "more than {cap} o-d paths"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&msgs.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLinkIncidence {
    pub b: Vec<Vec<i8>>,
}

impl NodeLinkIncidence {
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.b
            .iter()
            .map(|row| row.iter().zip(y).map(|(&b, &v)| b as f64 * v).sum())
            .collect()
    }
}

/// The o-d paths of a topology together with the link-path incidence `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    paths: Vec<Vec<usize>>,
    num_links: usize,
    /// Row-major `num_links x num_paths` 0/1 matrix.
    incidence: Vec<u8>,
}

impl PathSet {
    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn num_links(&self) -> usize {
        self.num_links
    }

    pub fn incidence(&self, link: usize, path: usize) -> u8 {
        self.incidence[link * self.paths.len() + path]
    }

    /// Dense copy of `A` (rows = links, columns = paths).
    pub fn incidence_matrix(&self) -> Vec<Vec<u8>> {
        self.incidence
            .chunks(self.paths.len().max(1))
            .take(self.num_links)
            .map(|r| r.to_vec())
            .collect()
    }

    /// `A z`.
    pub fn link_flows(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.num_links];
        for (p, &zp) in self.paths.iter().zip(z) {
            for &i in p {
                y[i] += zp;
            }
        }
        y
    }

    /// `A' c`.
    pub fn path_sums(&self, link_values: &[f64]) -> Vec<f64> {
        self.paths
            .iter()
            .map(|p| p.iter().map(|&i| link_values[i]).sum())
            .collect()
    }

    pub fn index_of(&self, path: &[usize]) -> Option<usize> {
        self.paths.iter().position(|p| p == path)
    }
}

/// Enumerates all simple o-d paths.
///
/// Paths are ordered by length, ties broken lexicographically on the link
/// index sequence.
pub fn enumerate_paths(t: &Topology) -> Result<PathSet, NetworkError> {
    enumerate_paths_with_cap(t, DEFAULT_PATH_CAP)
}

pub fn enumerate_paths_with_cap(t: &Topology, cap: usize) -> Result<PathSet, NetworkError> {
    let report = t.validate_with_cap(cap);
    if let Some(Violation::TooManyPaths { cap }) = report
        .violations
        .iter()
        .find(|v| matches!(v, Violation::TooManyPaths { .. }))
    {
        return Err(NetworkError::TooManyPaths(*cap));
    }
    if !report.is_empty() {
        return Err(NetworkError::Invalid(report));
    }
    let paths = simple_paths(t, cap)?;
    let m = t.num_links();
    let n = paths.len();
    let mut incidence = vec![0u8; m * n];
    for (p, path) in paths.iter().enumerate() {
        for &i in path {
            incidence[i * n + p] = 1;
        }
    }
    Ok(PathSet {
        paths,
        num_links: m,
        incidence,
    })
}

fn simple_paths(t: &Topology, cap: usize) -> Result<Vec<Vec<usize>>, NetworkError> {
    let mut out_links: Vec<Vec<usize>> = vec![Vec::new(); t.num_nodes()];
    for (i, l) in t.links.iter().enumerate() {
        if l.tail != l.head {
            out_links[l.tail].push(i);
        }
    }
    let mut paths = Vec::new();
    let mut on_path = vec![false; t.num_nodes()];
    let mut current = Vec::new();
    on_path[t.origin] = true;
    dfs(
        t,
        &out_links,
        t.origin,
        &mut on_path,
        &mut current,
        &mut paths,
        cap,
    )?;
    paths.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(paths)
}

fn dfs(
    t: &Topology,
    out_links: &[Vec<usize>],
    node: usize,
    on_path: &mut [bool],
    current: &mut Vec<usize>,
    paths: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<(), NetworkError> {
    if node == t.destination {
        if paths.len() >= cap {
            return Err(NetworkError::TooManyPaths(cap));
        }
        paths.push(current.clone());
        return Ok(());
    }
    for &i in &out_links[node] {
        let next = t.links[i].head;
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        current.push(i);
        dfs(t, out_links, next, on_path, current, paths, cap)?;
        current.pop();
        on_path[next] = false;
    }
    Ok(())
}

/// Max-flow result on the link-level multigraph.
#[derive(Debug, Clone)]
pub struct MaxFlow {
    pub value: f64,
    /// Flow carried by each link.
    pub link_flow: Vec<f64>,
}

/// Edmonds-Karp max-flow from origin to destination. Infinite capacities are
/// replaced by [`INFINITE_CAPACITY`].
pub fn max_flow(t: &Topology, capacities: &[f64]) -> Result<MaxFlow, NetworkError> {
    if capacities.len() != t.num_links() {
        return Err(NetworkError::DimensionMismatch {
            expected: t.num_links(),
            got: capacities.len(),
        });
    }
    let caps: Vec<f64> = capacities
        .iter()
        .map(|&c| if c.is_infinite() { INFINITE_CAPACITY } else { c })
        .collect();
    if let Some(&c) = caps.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(NetworkError::BadCapacity(c));
    }
    // arc 2i is link i forward, arc 2i+1 its residual twin
    let n = t.num_nodes();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut residual = Vec::with_capacity(2 * caps.len());
    for (i, l) in t.links.iter().enumerate() {
        adj[l.tail].push(2 * i);
        adj[l.head].push(2 * i + 1);
        residual.push(caps[i]);
        residual.push(0.0);
    }
    let arc_head = |a: usize| {
        let l = &t.links[a / 2];
        if a.is_multiple_of(2) {
            l.head
        } else {
            l.tail
        }
    };
    let largest_finite = caps
        .iter()
        .cloned()
        .filter(|&c| c < INFINITE_CAPACITY)
        .fold(0.0, f64::max);
    let tol = 1e-15 * largest_finite;
    let mut value = 0.0;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut visited = vec![false; n];
        visited[t.origin] = true;
        let mut queue = VecDeque::from([t.origin]);
        while let Some(v) = queue.pop_front() {
            if v == t.destination {
                break;
            }
            for &a in &adj[v] {
                let w = arc_head(a);
                if !visited[w] && residual[a] > tol {
                    visited[w] = true;
                    pred[w] = Some(a);
                    queue.push_back(w);
                }
            }
        }
        if !visited[t.destination] {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t.destination;
        while let Some(a) = pred[v] {
            bottleneck = bottleneck.min(residual[a]);
            v = arc_head(a ^ 1);
        }
        let mut v = t.destination;
        while let Some(a) = pred[v] {
            residual[a] -= bottleneck;
            residual[a ^ 1] += bottleneck;
            v = arc_head(a ^ 1);
        }
        value += bottleneck;
    }
    let link_flow = (0..caps.len()).map(|i| residual[2 * i + 1]).collect();
    Ok(MaxFlow { value, link_flow })
}

/// Min-cut capacity between origin and destination, computed as a max-flow.
pub fn min_cut_capacity(t: &Topology, capacities: &[f64]) -> Result<f64, NetworkError> {
    Ok(max_flow(t, capacities)?.value)
}

/// `y^z = A z` for a preference on the simplex.
pub fn equilibrium_flow(paths: &PathSet, z: &PathPreference) -> Result<Vec<f64>, NetworkError> {
    if z.len() != paths.len() {
        return Err(NetworkError::DimensionMismatch {
            expected: paths.len(),
            got: z.len(),
        });
    }
    Ok(paths.link_flows(z.values()))
}

/// A validated topology with its enumerated paths and per-node link lists.
#[derive(Debug, Clone)]
pub struct Network {
    topology: Topology,
    paths: PathSet,
    out_links: Vec<Vec<usize>>,
    in_links: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(topology: Topology) -> Result<Self, NetworkError> {
        Self::with_path_cap(topology, DEFAULT_PATH_CAP)
    }

    pub fn with_path_cap(topology: Topology, cap: usize) -> Result<Self, NetworkError> {
        let paths = enumerate_paths_with_cap(&topology, cap)?;
        let mut out_links = vec![Vec::new(); topology.num_nodes()];
        let mut in_links = vec![Vec::new(); topology.num_nodes()];
        for (i, l) in topology.links().iter().enumerate() {
            out_links[l.tail].push(i);
            in_links[l.head].push(i);
        }
        Ok(Self {
            topology,
            paths,
            out_links,
            in_links,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn paths(&self) -> &PathSet {
        &self.paths
    }

    pub fn num_links(&self) -> usize {
        self.topology.num_links()
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Links leaving `node`.
    pub fn out_links(&self, node: usize) -> &[usize] {
        &self.out_links[node]
    }

    /// Links entering `node`.
    pub fn in_links(&self, node: usize) -> &[usize] {
        &self.in_links[node]
    }

    pub fn min_cut_capacity(&self, capacities: &[f64]) -> Result<f64, NetworkError> {
        min_cut_capacity(&self.topology, capacities)
    }
}

/// Example 1 multigraph: nodes o, a, b, d with the a <-> b cycle.
pub fn fig1_topology() -> Topology {
    Topology::new(
        &["o", "a", "b", "d"],
        &[
            ("i1", "o", "a"),
            ("i2", "o", "b"),
            ("i3", "a", "b"),
            ("i4", "b", "a"),
            ("i5", "a", "d"),
            ("i6", "b", "d"),
        ],
        "o",
        "d",
    )
    .expect("builtin topology")
}

/// Five-link network used in the simulation study.
pub fn fig4_topology() -> Topology {
    Topology::new(
        &["o", "a", "b", "d"],
        &[
            ("i1", "o", "a"),
            ("i2", "o", "b"),
            ("i3", "a", "b"),
            ("i4", "a", "d"),
            ("i5", "b", "d"),
        ],
        "o",
        "d",
    )
    .expect("builtin topology")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(t: &Topology, ps: &PathSet) -> Vec<Vec<String>> {
        ps.paths()
            .iter()
            .map(|p| p.iter().map(|&i| t.links()[i].id.clone()).collect())
            .collect()
    }

    #[test]
    fn fig1_paths_match_listing() {
        let t = fig1_topology();
        assert!(t.validate().is_empty());
        let ps = enumerate_paths(&t).unwrap();
        assert_eq!(
            names(&t, &ps),
            vec![
                vec!["i1", "i5"],
                vec!["i2", "i6"],
                vec!["i1", "i3", "i6"],
                vec!["i2", "i4", "i5"],
            ]
        );
    }

    #[test]
    fn fig4_has_three_paths() {
        let t = fig4_topology();
        let ps = enumerate_paths(&t).unwrap();
        assert_eq!(
            names(&t, &ps),
            vec![vec!["i1", "i4"], vec!["i2", "i5"], vec!["i1", "i3", "i5"]]
        );
    }

    #[test]
    fn single_link() {
        let t = Topology::new(&["o", "d"], &[("e", "o", "d")], "o", "d").unwrap();
        assert!(t.validate().is_empty());
        assert_eq!(enumerate_paths(&t).unwrap().len(), 1);
        assert_eq!(min_cut_capacity(&t, &[2.5]).unwrap(), 2.5);
    }

    #[test]
    fn dangling_link_reported() {
        let t = Topology::new(
            &["o", "a", "d"],
            &[("e1", "o", "d"), ("e2", "o", "a")],
            "o",
            "d",
        )
        .unwrap();
        let r = t.validate();
        assert_eq!(r.violations, vec![Violation::LinkOffAllPaths { link: 1 }]);
        assert!(r.to_string().contains("off all paths"));
        assert!(matches!(enumerate_paths(&t), Err(NetworkError::Invalid(_))));
    }

    #[test]
    fn self_loop_and_unreachable() {
        let t = Topology::new(
            &["o", "d"],
            &[("e1", "o", "o"), ("e2", "d", "o")],
            "o",
            "d",
        )
        .unwrap();
        let r = t.validate();
        assert!(r.violations.contains(&Violation::SelfLoop { link: 0 }));
        assert!(r.violations.contains(&Violation::DestinationUnreachable));
    }

    #[test]
    fn path_cap_enforced() {
        let t = fig1_topology();
        assert!(matches!(
            enumerate_paths_with_cap(&t, 3),
            Err(NetworkError::TooManyPaths(3))
        ));
    }

    #[test]
    fn fig1_min_cut() {
        let t = fig1_topology();
        let c = min_cut_capacity(&t, &[3.0, 1.0, 1.0, 1.0, 1.0, 3.0]).unwrap();
        assert_eq!(c, 3.0);
    }

    #[test]
    fn infinite_capacity_sentinel() {
        let t = Topology::new(
            &["o", "a", "d"],
            &[("e1", "o", "a"), ("e2", "a", "d")],
            "o",
            "d",
        )
        .unwrap();
        assert_eq!(min_cut_capacity(&t, &[f64::INFINITY, 1.5]).unwrap(), 1.5);
        assert!(min_cut_capacity(&t, &[0.0, 1.5]).is_err());
    }

    #[test]
    fn incidence_columns() {
        let t = fig1_topology();
        let b = t.node_link_incidence();
        for i in 0..t.num_links() {
            let col: Vec<i8> = b.b.iter().map(|r| r[i]).collect();
            assert_eq!(col.iter().filter(|&&v| v == 1).count(), 1);
            assert_eq!(col.iter().filter(|&&v| v == -1).count(), 1);
            assert_eq!(col[t.links()[i].tail], 1);
        }
    }

    #[test]
    fn fig4_equilibrium_flows() {
        let t = fig4_topology();
        let ps = enumerate_paths(&t).unwrap();
        let z = PathPreference::new(vec![0.5, 1.0 / 6.0, 1.0 / 3.0], 1.0).unwrap();
        let y = equilibrium_flow(&ps, &z).unwrap();
        let expect = [5.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0, 0.5, 0.5];
        for (a, b) in y.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let z = PathPreference::new(vec![0.5, 0.5, 0.0], 1.0).unwrap();
        assert_eq!(
            equilibrium_flow(&ps, &z).unwrap(),
            vec![0.5, 0.5, 0.0, 0.5, 0.5]
        );
        let z = PathPreference::new(vec![0.5, 0.5], 1.0).unwrap();
        assert!(equilibrium_flow(&ps, &z).is_err());
    }
}
