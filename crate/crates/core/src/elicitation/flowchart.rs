use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::VisualizationGoal;

const SHIPPED_FLOWCHART: &str = include_str!("../../data/flowchart.json");

/// Question ids used by the session itself.
pub const RESERVED_IDS: [&str; 3] = ["analysis_type", "another_goal", "interactions"];

/// Where a yes/no answer leads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Node(String),
    Emit(VisualizationGoal),
    /// Back to the root question.
    Restart,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowNode {
    pub id: String,
    pub text: String,
    pub yes: Edge,
    pub no: Edge,
}

/// Yes/no decision tree whose leaves emit visualization goals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoalFlowchart {
    root: String,
    nodes: Vec<FlowNode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowchartDoc {
    root: String,
    nodes: Vec<FlowNode>,
}

impl GoalFlowchart {
    pub fn new(root: impl Into<String>, nodes: Vec<FlowNode>) -> Result<Self> {
        let chart = GoalFlowchart {
            root: root.into(),
            nodes,
        };
        chart.check()?;
        Ok(chart)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FlowchartDoc = serde_json::from_str(text).map_err(|e| Error::BadFlowchart(e.to_string()))?;
        Self::new(doc.root, doc.nodes)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
        Self::from_json(&text)
    }

    pub fn shipped() -> Self {
        Self::from_json(SHIPPED_FLOWCHART).expect("shipped flowchart is valid")
    }

    pub fn root(&self) -> &FlowNode {
        self.node(&self.root).expect("root checked at construction")
    }

    pub fn node(&self, id: &str) -> Option<&FlowNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn nodes(&self) -> &[FlowNode] {
        &self.nodes
    }

    /// Goals emitted by some leaf.
    pub fn emitted_goals(&self) -> BTreeSet<VisualizationGoal> {
        self.nodes
            .iter()
            .flat_map(|n| [&n.yes, &n.no])
            .filter_map(|e| match e {
                Edge::Emit(g) => Some(*g),
                _ => None,
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadFlowchart(msg));
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if RESERVED_IDS.contains(&n.id.as_str()) {
                return bad(format!("node id {:?} is reserved", n.id));
            }
            if n.id.is_empty() || n.text.trim().is_empty() {
                return bad("node ids and texts must be non-empty".into());
            }
            if !ids.insert(n.id.as_str()) {
                return bad(format!("duplicate node id {:?}", n.id));
            }
        }
        if !ids.contains(self.root.as_str()) {
            return bad(format!("root {:?} is not a node", self.root));
        }
        let index: HashMap<&str, &FlowNode> = self.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
        for n in &self.nodes {
            for e in [&n.yes, &n.no] {
                if let Edge::Node(t) = e {
                    if !index.contains_key(t.as_str()) {
                        return bad(format!("node {:?} points to unknown node {t:?}", n.id));
                    }
                }
            }
        }

        // Depth-first walk from the root; node edges must not form a cycle.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: HashMap<&str, Mark> = HashMap::new();
        let mut stack: Vec<(&str, usize)> = vec![(self.root.as_str(), 0)];
        marks.insert(&self.root, Mark::Open);
        while let Some((id, edge)) = stack.pop() {
            let node = index[id];
            let edges = [&node.yes, &node.no];
            if edge == edges.len() {
                marks.insert(id, Mark::Done);
                continue;
            }
            stack.push((id, edge + 1));
            if let Edge::Node(t) = edges[edge] {
                match marks.get(t.as_str()) {
                    Some(Mark::Open) => return bad(format!("cycle through node {t:?}")),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(t, Mark::Open);
                        stack.push((t, 0));
                    }
                }
            }
        }
        if let Some(n) = self.nodes.iter().find(|n| !marks.contains_key(n.id.as_str())) {
            return bad(format!("node {:?} is unreachable from the root", n.id));
        }

        let emitted = self.emitted_goals();
        let missing: Vec<&str> = VisualizationGoal::ALL
            .iter()
            .filter(|g| !emitted.contains(g))
            .map(|g| g.keyword())
            .collect();
        if !missing.is_empty() {
            return bad(format!("goals never emitted: {}", missing.join(", ")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, yes: Edge, no: Edge) -> FlowNode {
        FlowNode {
            id: id.into(),
            text: format!("{id}?"),
            yes,
            no,
        }
    }

    fn chain(goals: &[VisualizationGoal]) -> Vec<FlowNode> {
        goals
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let no = if i + 1 == goals.len() {
                    Edge::Restart
                } else {
                    Edge::Node(format!("n{}", i + 1))
                };
                node(&format!("n{i}"), Edge::Emit(*g), no)
            })
            .collect()
    }

    #[test]
    fn shipped_flowchart_covers_every_goal() {
        let f = GoalFlowchart::shipped();
        assert_eq!(f.emitted_goals().len(), 8);
        assert_eq!(f.root().text, "Is your data tied to geographic locations?");
    }

    #[test]
    fn missing_goal_is_rejected() {
        let err = GoalFlowchart::new("n0", chain(&VisualizationGoal::ALL[..7])).unwrap_err();
        assert_eq!(err.code(), "E_BAD_FLOWCHART");
        assert!(err.to_string().contains("Geospatial"));
    }

    #[test]
    fn cycle_is_rejected() {
        let mut nodes = chain(VisualizationGoal::ALL);
        nodes[7].no = Edge::Node("n0".into());
        let err = GoalFlowchart::new("n0", nodes).unwrap_err();
        assert!(err.to_string().contains("cycle"));
    }

    #[test]
    fn unreachable_and_dangling_nodes_are_rejected() {
        let mut nodes = chain(VisualizationGoal::ALL);
        nodes.push(node("orphan", Edge::Restart, Edge::Restart));
        assert!(GoalFlowchart::new("n0", nodes)
            .unwrap_err()
            .to_string()
            .contains("unreachable"));

        let mut nodes = chain(VisualizationGoal::ALL);
        nodes[0].no = Edge::Node("nowhere".into());
        assert!(GoalFlowchart::new("n0", nodes)
            .unwrap_err()
            .to_string()
            .contains("nowhere"));
    }

    #[test]
    fn reserved_and_duplicate_ids_are_rejected() {
        let mut nodes = chain(VisualizationGoal::ALL);
        nodes[3].id = "another_goal".into();
        assert!(GoalFlowchart::new("n0", nodes).is_err());
        let mut nodes = chain(VisualizationGoal::ALL);
        nodes.push(nodes[1].clone());
        assert!(GoalFlowchart::new("n0", nodes)
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
    }

    #[test]
    fn edge_json_forms() {
        let f = GoalFlowchart::from_json(
            r#"{"root": "a", "nodes": [{"id": "a", "text": "A?", "yes": {"emit": "Order"}, "no": "restart"}]}"#,
        );
        assert!(f.unwrap_err().to_string().contains("never emitted"));
        assert!(GoalFlowchart::from_json("{}").is_err());
    }
}
