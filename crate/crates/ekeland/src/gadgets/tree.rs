use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::GadgetError;

/// A node written either as an array of entries or, for binary trees, as a bit string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRepr {
    Bits(String),
    Entries(Vec<u64>),
}

/// File form of a finite tree with depth bound `depth` and entries below `branching`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub nodes: Vec<NodeRepr>,
    pub depth: usize,
    #[serde(default = "binary")]
    pub branching: u64,
}

fn binary() -> u64 {
    2
}

/// A downward closed set of sequences of length at most `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    nodes: BTreeSet<Vec<u64>>,
    depth: usize,
    branching: u64,
}

impl Tree {
    /// The downward closure of `nodes`; the root is always present.
    pub fn new(
        nodes: impl IntoIterator<Item = Vec<u64>>,
        depth: usize,
        branching: u64,
    ) -> Result<Tree, GadgetError> {
        if branching == 0 {
            return Err(GadgetError::Tree("branching must be positive".into()));
        }
        let mut set = BTreeSet::new();
        set.insert(vec![]);
        for node in nodes {
            if node.len() > depth {
                return Err(GadgetError::Tree(format!("node {node:?} is longer than depth {depth}")));
            }
            if let Some(e) = node.iter().find(|&&e| e >= branching) {
                return Err(GadgetError::Tree(format!(
                    "node {node:?} has entry {e} outside 0..{branching}"
                )));
            }
            for k in 1..=node.len() {
                set.insert(node[..k].to_vec());
            }
        }
        Ok(Tree { nodes: set, depth, branching })
    }

    /// A binary tree from bit strings such as `"01"`.
    pub fn binary(nodes: &[&str], depth: usize) -> Result<Tree, GadgetError> {
        let parsed = nodes.iter().map(|s| parse_bits(s)).collect::<Result<Vec<_>, _>>()?;
        Tree::new(parsed, depth, 2)
    }

    pub fn from_spec(spec: &TreeSpec) -> Result<Tree, GadgetError> {
        let mut nodes = Vec::with_capacity(spec.nodes.len());
        for n in &spec.nodes {
            nodes.push(match n {
                NodeRepr::Bits(s) => parse_bits(s)?,
                NodeRepr::Entries(v) => v.clone(),
            });
        }
        Tree::new(nodes, spec.depth, spec.branching)
    }

    pub fn to_spec(&self) -> TreeSpec {
        TreeSpec {
            nodes: self.nodes.iter().filter(|n| !n.is_empty()).cloned().map(NodeRepr::Entries).collect(),
            depth: self.depth,
            branching: self.branching,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> u64 {
        self.branching
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.nodes.iter()
    }

    pub fn contains(&self, sigma: &[u64]) -> bool {
        self.nodes.contains(sigma)
    }

    pub fn children(&self, sigma: &[u64]) -> Vec<Vec<u64>> {
        (0..self.branching)
            .map(|b| {
                let mut c = sigma.to_vec();
                c.push(b);
                c
            })
            .filter(|c| self.nodes.contains(c))
            .collect()
    }

    pub fn is_leaf(&self, sigma: &[u64]) -> bool {
        self.contains(sigma) && self.children(sigma).is_empty()
    }

    /// Nodes without children, in lexicographic order.
    pub fn leaves(&self) -> Vec<Vec<u64>> {
        self.nodes.iter().filter(|s| self.is_leaf(s)).cloned().collect()
    }

    /// Whether some node of length `len` extends `prefix`.
    pub fn has_extension(&self, prefix: &[u64], len: usize) -> bool {
        self.nodes.range(prefix.to_vec()..).take_while(|n| n.starts_with(prefix)).any(|n| n.len() == len)
    }

    /// The lexicographically first node of length `len`, found by depth-first search.
    pub fn path_of_length(&self, len: usize) -> Option<Vec<u64>> {
        fn dfs(t: &Tree, sigma: &mut Vec<u64>, len: usize) -> bool {
            if sigma.len() == len {
                return true;
            }
            for b in 0..t.branching {
                sigma.push(b);
                if t.contains(sigma) && dfs(t, sigma, len) {
                    return true;
                }
                sigma.pop();
            }
            false
        }
        let mut sigma = Vec::new();
        dfs(self, &mut sigma, len).then_some(sigma)
    }

    /// A path through the depth bound, the finite stand-in for an infinite path.
    pub fn deep_path(&self) -> Option<Vec<u64>> {
        self.path_of_length(self.depth)
    }

    /// All nodes of length `len`, in lexicographic order.
    pub fn level(&self, len: usize) -> Vec<Vec<u64>> {
        self.nodes.iter().filter(|n| n.len() == len).cloned().collect()
    }
}

fn parse_bits(s: &str) -> Result<Vec<u64>, GadgetError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(GadgetError::Tree(format!("bad bit {c:?} in {s:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_leaves() {
        let t = Tree::binary(&["01", "1"], 3).unwrap();
        assert!(t.contains(&[0]));
        assert_eq!(t.leaves(), vec![vec![0, 1], vec![1]]);
        assert!(t.has_extension(&[0], 2));
        assert!(!t.has_extension(&[1], 2));
        assert_eq!(t.path_of_length(2), Some(vec![0, 1]));
        assert_eq!(t.deep_path(), None);
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(Tree::binary(&["0101"], 3).is_err());
        assert!(Tree::new(vec![vec![2]], 3, 2).is_err());
        assert!(Tree::binary(&["0x"], 3).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let j = r#"{"nodes": ["01", [1, 1]], "depth": 4}"#;
        let spec: TreeSpec = serde_json::from_str(j).unwrap();
        let t = Tree::from_spec(&spec).unwrap();
        assert_eq!(t.leaves(), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(Tree::from_spec(&t.to_spec()).unwrap(), t);
    }
}
