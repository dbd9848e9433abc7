use std::collections::BTreeSet;

use crate::error::{CqaError, Result};

/// Largest node count `brute_3col` will try.
pub const BRUTE_3COL_LIMIT: usize = 10;

/// A simple undirected graph with named nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    nodes: Vec<String>,
    /// Pairs of node indices with `u < v`.
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    /// Index of `name`, adding it if new.
    pub fn add_node(&mut self, name: &str) -> usize {
        match self.nodes.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.nodes.push(name.to_string());
                self.nodes.len() - 1
            }
        }
    }

    pub fn add_edge(&mut self, u: &str, v: &str) -> Result<()> {
        if u == v {
            return Err(CqaError::Reduction(format!("self-loop on `{u}`")));
        }
        let (a, b) = (self.add_node(u), self.add_node(v));
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    /// The complete graph on nodes `v1..vn`.
    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new();
        for i in 1..=n {
            g.add_node(&format!("v{i}"));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                g.add_edge(&format!("v{i}"), &format!("v{j}")).expect("distinct");
            }
        }
        g
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].as_str(), self.nodes[b].as_str()))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Parses a whitespace edge list: `u v` per line, or a lone `u` for an
    /// isolated node. `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut g = Graph::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                [] => {}
                [u] => {
                    g.add_node(u);
                }
                [u, v] => g.add_edge(u, v).map_err(|e| {
                    CqaError::syntax(idx + 1, 1, e.to_string())
                })?,
                _ => {
                    return Err(CqaError::syntax(
                        idx + 1,
                        1,
                        "expected one or two node names per line",
                    ))
                }
            }
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut touched = vec![false; self.nodes.len()];
        let mut s = String::new();
        for &(a, b) in &self.edges {
            touched[a] = true;
            touched[b] = true;
            s.push_str(&format!("{} {}\n", self.nodes[a], self.nodes[b]));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if !touched[i] {
                s.push_str(&format!("{n}\n"));
            }
        }
        s
    }
}

/// 3-colorability by trying every coloring.
pub fn brute_3col(g: &Graph) -> Result<bool> {
    let n = g.nodes.len();
    if n > BRUTE_3COL_LIMIT {
        return Err(CqaError::Budget {
            what: "brute-force node",
            limit: BRUTE_3COL_LIMIT as u64,
            hint: "",
        });
    }
    let mut colors = vec![0u8; n];
    let total = 3usize.pow(n as u32);
    for mut code in 0..total {
        for c in colors.iter_mut() {
            *c = (code % 3) as u8;
            code /= 3;
        }
        if g.edges.iter().all(|&(a, b)| colors[a] != colors[b]) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_color() {
        let g = Graph::parse_edge_list("# triangle\na b\nb c\nc a\nd\n").unwrap();
        assert_eq!(g.nodes().len(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(brute_3col(&g).unwrap());
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap().edge_count(), 3);
        assert!(!brute_3col(&Graph::complete(4)).unwrap());
        assert!(Graph::parse_edge_list("a a").is_err());
        assert!(Graph::parse_edge_list("a b c").is_err());
        assert!(brute_3col(&Graph::complete(11)).unwrap_err().is_budget());
    }
}
