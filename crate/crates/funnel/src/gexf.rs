//! GEXF 1.2draft writer and reader.
//!
//! Output is fully determined by the graph: nodes appear in key order, edges
//! in `(source, target, kind)` order, numbers use Rust's shortest round-trip
//! formatting and no timestamps are embedded. Besides the `kind`/`is_retweet`
//! node attributes and the `kind` edge attribute, edges carry `first_seen` so
//! a parsed document rebuilds the graph exactly.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use funnel_core::{EdgeKind, GraphError, MultimodalGraph, NodeKey, NodeKind, Point};

pub const GEXF_NS: &str = "http://www.gexf.net/1.2draft";
pub const VIZ_NS: &str = "http://www.gexf.net/1.2draft/viz";

/// What tweet nodes show as their label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TweetLabels {
    /// The cleaned, truncated tweet text.
    #[default]
    Text,
    /// The tweet id.
    Id,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GexfOptions {
    /// Emit a dynamic graph whose edges start at their `first_seen` time.
    pub dynamic: bool,
    pub tweet_labels: TweetLabels,
}

/// Escapes text for use in a double-quoted attribute value. Tabs and line
/// breaks become character references so attribute normalization does not
/// turn them into spaces; characters XML 1.0 cannot carry become U+FFFD.
pub fn escape_attr(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c if is_xml_char(c) => out.push(c),
            _ => out.push('\u{FFFD}'),
        }
    }
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..='\u{10FFFF}')
}

fn attr(out: &mut String, name: &str, value: &str) {
    out.push(' ');
    out.push_str(name);
    out.push_str("=\"");
    escape_attr(value, out);
    out.push('"');
}

/// Serializes `graph`. Nodes missing from `positions` get no viz element.
pub fn write_gexf(graph: &MultimodalGraph, positions: Option<&BTreeMap<NodeKey, Point>>, options: &GexfOptions) -> String {
    let mut out = String::with_capacity(256 + 200 * (graph.node_count() + graph.edge_count()));
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<gexf xmlns=\"{GEXF_NS}\" xmlns:viz=\"{VIZ_NS}\" version=\"1.2\">");
    out.push_str("  <meta>\n    <creator>funnel</creator>\n  </meta>\n");
    if options.dynamic {
        out.push_str("  <graph defaultedgetype=\"directed\" mode=\"dynamic\" timeformat=\"integer\">\n");
    } else {
        out.push_str("  <graph defaultedgetype=\"directed\" mode=\"static\">\n");
    }
    out.push_str(concat!(
        "    <attributes class=\"node\" mode=\"static\">\n",
        "      <attribute id=\"kind\" title=\"kind\" type=\"string\"/>\n",
        "      <attribute id=\"is_retweet\" title=\"is_retweet\" type=\"boolean\"/>\n",
        "    </attributes>\n",
        "    <attributes class=\"edge\" mode=\"static\">\n",
        "      <attribute id=\"kind\" title=\"kind\" type=\"string\"/>\n",
        "      <attribute id=\"first_seen\" title=\"first_seen\" type=\"long\"/>\n",
        "    </attributes>\n",
    ));

    out.push_str("    <nodes>\n");
    for (key, node) in graph.nodes() {
        let id = key.to_string();
        let label = match (key.kind, options.tweet_labels) {
            (NodeKind::Tweet, TweetLabels::Id) => key.id.as_str(),
            _ => node.label.as_str(),
        };
        out.push_str("      <node");
        attr(&mut out, "id", &id);
        attr(&mut out, "label", label);
        out.push_str(">\n        <attvalues>\n");
        let _ = writeln!(out, "          <attvalue for=\"kind\" value=\"{}\"/>", key.kind.as_str());
        let _ = writeln!(out, "          <attvalue for=\"is_retweet\" value=\"{}\"/>", node.is_retweet);
        out.push_str("        </attvalues>\n");
        if let Some(p) = positions.and_then(|m| m.get(key)) {
            let _ = writeln!(out, "        <viz:position x=\"{}\" y=\"{}\" z=\"0\"/>", p.x, p.y);
        }
        out.push_str("      </node>\n");
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for (i, (key, edge)) in graph.edges().enumerate() {
        let _ = write!(out, "      <edge id=\"{i}\"");
        attr(&mut out, "source", &key.source.to_string());
        attr(&mut out, "target", &key.target.to_string());
        let _ = write!(out, " weight=\"{}\"", edge.weight);
        if options.dynamic {
            let _ = write!(out, " start=\"{}\"", edge.first_seen);
        }
        out.push_str(">\n        <attvalues>\n");
        let _ = writeln!(out, "          <attvalue for=\"kind\" value=\"{}\"/>", key.kind.as_str());
        let _ = writeln!(out, "          <attvalue for=\"first_seen\" value=\"{}\"/>", edge.first_seen);
        out.push_str("        </attvalues>\n      </edge>\n");
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

#[derive(Debug, thiserror::Error)]
pub enum GexfError {
    #[error("malformed XML: {0}")]
    MalformedXml(#[from] roxmltree::Error),
    #[error("not a GEXF document: {0}")]
    NotGexf(&'static str),
    #[error("edge {edge} references undeclared node {node:?}")]
    UnknownNodeReference { edge: String, node: String },
    #[error("{element} {id:?} has no kind attribute value")]
    MissingKindAttribute { element: &'static str, id: String },
    #[error("invalid node {id:?}: {reason}")]
    InvalidNode { id: String, reason: String },
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("invalid edge {id:?}: {reason}")]
    InvalidEdge { id: String, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedGexf {
    pub graph: MultimodalGraph,
    /// Empty when the document has no viz positions.
    pub positions: BTreeMap<NodeKey, Point>,
}

fn element<'a, 'i>(parent: roxmltree::Node<'a, 'i>, name: &str) -> Option<roxmltree::Node<'a, 'i>> {
    parent.children().find(|n| n.is_element() && n.tag_name().name() == name)
}

fn elements<'a, 'i: 'a>(parent: roxmltree::Node<'a, 'i>, name: &'a str) -> impl Iterator<Item = roxmltree::Node<'a, 'i>> + 'a {
    parent.children().filter(move |n| n.is_element() && n.tag_name().name() == name)
}

/// Attribute id -> title for one attribute class.
fn attribute_titles(graph: roxmltree::Node, class: &str) -> HashMap<String, String> {
    elements(graph, "attributes")
        .filter(|a| a.attribute("class") == Some(class))
        .flat_map(|a| elements(a, "attribute").collect::<Vec<_>>())
        .filter_map(|a| Some((a.attribute("id")?.to_string(), a.attribute("title").unwrap_or(a.attribute("id")?).to_string())))
        .collect()
}

/// Attribute values of an element, keyed by attribute title.
fn attvalues<'a>(el: roxmltree::Node<'a, '_>, titles: &HashMap<String, String>) -> HashMap<String, &'a str> {
    element(el, "attvalues")
        .into_iter()
        .flat_map(|av| elements(av, "attvalue").collect::<Vec<_>>())
        .filter_map(|v| {
            let key = v.attribute("for")?;
            let title = titles.get(key).cloned().unwrap_or_else(|| key.to_string());
            Some((title, v.attribute("value")?))
        })
        .collect()
}

/// Reads a document produced by [`write_gexf`] or laid out the same way.
pub fn parse_gexf(document: &str) -> Result<ParsedGexf, GexfError> {
    let doc = roxmltree::Document::parse(document)?;
    let root = doc.root_element();
    if root.tag_name().name() != "gexf" {
        return Err(GexfError::NotGexf("root element is not <gexf>"));
    }
    let graph_el = element(root, "graph").ok_or(GexfError::NotGexf("missing <graph>"))?;
    let node_titles = attribute_titles(graph_el, "node");
    let edge_titles = attribute_titles(graph_el, "edge");

    let mut parsed = ParsedGexf::default();
    let mut declared = HashMap::new();
    for node in element(graph_el, "nodes").into_iter().flat_map(|n| elements(n, "node").collect::<Vec<_>>()) {
        let id = node.attribute("id").ok_or_else(|| GexfError::InvalidNode { id: String::new(), reason: "missing id".into() })?;
        let values = attvalues(node, &node_titles);
        let kind = values.get("kind").ok_or_else(|| GexfError::MissingKindAttribute { element: "node", id: id.to_string() })?;
        let invalid = |reason: &str| GexfError::InvalidNode { id: id.to_string(), reason: reason.to_string() };
        let kind = NodeKind::parse(kind).ok_or_else(|| invalid("unknown kind"))?;
        let key = NodeKey::parse(id).ok_or_else(|| invalid("id is not of the form kind:id"))?;
        if key.kind != kind {
            return Err(invalid("kind attribute disagrees with id"));
        }
        let is_retweet = match values.get("is_retweet").copied() {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(_) => return Err(invalid("is_retweet is not a boolean")),
        };
        if declared.insert(id.to_string(), key.clone()).is_some() {
            return Err(GexfError::DuplicateNode(id.to_string()));
        }
        parsed.graph.upsert_node(key.clone(), node.attribute("label").unwrap_or(id), is_retweet);
        if let Some(pos) = element(node, "position") {
            let coord = |name| pos.attribute(name).map_or(Ok(0.0), |v: &str| v.parse::<f64>().map_err(|_| invalid("bad position")));
            parsed.positions.insert(key, Point::new(coord("x")?, coord("y")?));
        }
    }

    for edge in element(graph_el, "edges").into_iter().flat_map(|n| elements(n, "edge").collect::<Vec<_>>()) {
        let id = edge.attribute("id").unwrap_or("").to_string();
        let endpoint = |name| -> Result<&NodeKey, GexfError> {
            let node = edge.attribute(name).ok_or_else(|| GexfError::InvalidEdge { id: id.clone(), reason: format!("missing {name}") })?;
            declared.get(node).ok_or_else(|| GexfError::UnknownNodeReference { edge: id.clone(), node: node.to_string() })
        };
        let (source, target) = (endpoint("source")?, endpoint("target")?);
        let values = attvalues(edge, &edge_titles);
        let kind = values.get("kind").ok_or_else(|| GexfError::MissingKindAttribute { element: "edge", id: id.clone() })?;
        let invalid = |reason: &str| GexfError::InvalidEdge { id: id.clone(), reason: reason.to_string() };
        let kind = EdgeKind::parse(kind).ok_or_else(|| invalid("unknown kind"))?;
        let weight = match edge.attribute("weight") {
            None => 1,
            Some(w) => w.parse::<u64>().map_err(|_| invalid("weight is not a positive integer"))?,
        };
        let first_seen = match values.get("first_seen").copied().or_else(|| edge.attribute("start")) {
            None => 0,
            Some(t) => t.parse::<i64>().map_err(|_| invalid("first_seen is not an integer"))?,
        };
        parsed.graph.add_edge(source, target, kind, weight, first_seen)?;
    }
    Ok(parsed)
}
