//! JSON and DOT serialisation of frames.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::{Closure, Frame, FrameError, PointSet};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed frame JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("root `{0}` is not a point of the frame")]
    UnknownRoot(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameDoc {
    points: Vec<String>,
    edges: Vec<(String, String)>,
    closure: Closure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<String>,
}

/// Parses a frame document. The optional root is returned alongside.
pub fn read_frame(text: &str) -> Result<(Frame, Option<String>), IoError> {
    let doc: FrameDoc = serde_json::from_str(text)?;
    let frame = Frame::new(&doc.points, &doc.edges, doc.closure)?;
    if let Some(r) = &doc.root {
        if frame.index_of(r).is_none() {
            return Err(IoError::UnknownRoot(r.clone()));
        }
    }
    Ok((frame, doc.root))
}

/// Serialises a frame. Closed frames are written with their generating
/// edges only (see [`generating_edges`]), so reading the output back gives
/// the same frame.
pub fn write_frame(frame: &Frame, root: Option<&str>) -> String {
    let edges = match frame.closure() {
        Closure::None => frame.edges(),
        Closure::ReflexiveTransitive => generating_edges(frame),
    };
    let doc = FrameDoc {
        points: frame.names().to_vec(),
        edges: edges
            .into_iter()
            .map(|(a, b)| (frame.name(a).to_string(), frame.name(b).to_string()))
            .collect(),
        closure: frame.closure(),
        root: root.map(str::to_string),
    };
    serde_json::to_string_pretty(&doc).expect("frame documents always serialise")
}

/// A small edge set whose reflexive-transitive closure is the relation of a
/// closed frame: each cluster becomes a cycle in declaration order, and
/// clusters are joined by covering edges between their first members.
pub fn generating_edges(frame: &Frame) -> Vec<(usize, usize)> {
    let closed = frame.closed();
    let clusters = closed.clusters();
    let mut edges = Vec::new();
    for c in &clusters {
        let members: Vec<usize> = c.iter().collect();
        if members.len() > 1 {
            for w in 0..members.len() {
                edges.push((members[w], members[(w + 1) % members.len()]));
            }
        }
    }
    for c in &clusters {
        let x = c.first().unwrap();
        let strictly_above = closed.succ(x) - *c;
        for d in &clusters {
            let y = d.first().unwrap();
            if !strictly_above.contains(y) {
                continue;
            }
            // y covers x when nothing strictly between them
            let between = (strictly_above - *d) & closed.pred(y);
            if between.is_empty() {
                edges.push((x, y));
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Graphviz rendering. Closed frames are drawn with their generating edges
/// and loops are left implicit; frames without closure show every edge.
pub fn to_dot(frame: &Frame) -> String {
    let edges = match frame.closure() {
        Closure::None => frame.edges(),
        Closure::ReflexiveTransitive => generating_edges(frame),
    };
    let mut out = String::from("digraph frame {\n  rankdir=BT;\n");
    let mut reflexive = PointSet::EMPTY;
    for x in 0..frame.len() {
        if frame.relates(x, x) {
            reflexive.insert(x);
        }
        let shape = if frame.relates(x, x) { "circle" } else { "doublecircle" };
        out.push_str(&format!("  \"{}\" [shape={shape}];\n", escape(frame.name(x))));
    }
    for (a, b) in edges {
        if a == b && frame.closure() == Closure::ReflexiveTransitive {
            continue;
        }
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            escape(frame.name(a)),
            escape(frame.name(b))
        ));
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
