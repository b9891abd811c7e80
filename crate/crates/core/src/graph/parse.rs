//! Text formats: a whitespace edge list and a small subset of Graphviz DOT.

use std::collections::HashMap;
use std::str::FromStr;

use num::traits::{One, Signed};

use super::{order_labels, Digraph};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// One edge per line: `src dst [weight]`, `#` comments.
    EdgeList,
    /// `digraph { a -> b [weight=2]; ... }`.
    DotSubset,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "edge_list" | "edge-list" | "edges" => Ok(GraphFormat::EdgeList),
            "dot" | "dot_subset" | "dot-subset" => Ok(GraphFormat::DotSubset),
            other => Err(format!("unknown graph format `{other}`")),
        }
    }
}

impl GraphFormat {
    /// Guesses the format from a file name, defaulting to the edge list.
    pub fn from_path(path: &std::path::Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("dot") | Some("gv") => GraphFormat::DotSubset,
            _ => GraphFormat::EdgeList,
        }
    }
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Digraph> {
    let raw = match format {
        GraphFormat::EdgeList => parse_edge_list(text)?,
        GraphFormat::DotSubset => parse_dot(text)?,
    };
    raw.build()
}

struct RawEdge {
    line: usize,
    src: String,
    dst: String,
    weight: Rational,
}

#[derive(Default)]
struct RawGraph {
    vertices: Vec<String>,
    edges: Vec<RawEdge>,
}

impl RawGraph {
    fn build(self) -> Result<Digraph> {
        if self.vertices.is_empty() && self.edges.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "input contains no edges".into(),
            });
        }
        let labels = order_labels(
            self.vertices
                .into_iter()
                .chain(self.edges.iter().flat_map(|e| [e.src.clone(), e.dst.clone()])),
        );
        let pos: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let key = (pos[e.src.as_str()], pos[e.dst.as_str()]);
            if seen.insert(key, e.line).is_some() {
                return Err(Error::DuplicateEdge {
                    line: e.line,
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                });
            }
            edges.push((key.0, key.1, e.weight.clone()));
        }
        Digraph::new(labels, edges)
    }
}

fn parse_weight(token: &str, line: usize) -> Result<Rational> {
    let w = parse_rational(token).ok_or_else(|| Error::Parse {
        line,
        message: format!("malformed weight `{token}`"),
    })?;
    if !w.is_positive() {
        return Err(Error::BadWeight {
            line,
            weight: token.to_string(),
        });
    }
    Ok(w)
}

fn parse_edge_list(text: &str) -> Result<RawGraph> {
    let mut g = RawGraph::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let (src, dst, weight) = match tokens.as_slice() {
            [s, d] => (*s, *d, Rational::one()),
            [s, d, w] => (*s, *d, parse_weight(w, line)?),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `src dst [weight]`, found `{content}`"),
                })
            }
        };
        g.edges.push(RawEdge {
            line,
            src: src.to_string(),
            dst: dst.to_string(),
            weight,
        });
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Arrow,
    UndirectedEdge,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Sep,
}

fn tokenize_dot(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                let start = line;
                i += 2;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(Error::Parse {
                                line: start,
                                message: "unterminated comment".into(),
                            })
                        }
                        Some('*') if chars.get(i + 1) == Some(&'/') => {
                            i += 2;
                            break;
                        }
                        Some('\n') => {
                            line += 1;
                            i += 1;
                        }
                        Some(_) => i += 1,
                    }
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                toks.push((Tok::Arrow, line));
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                toks.push((Tok::UndirectedEdge, line));
                i += 2;
            }
            '{' => {
                toks.push((Tok::LBrace, line));
                i += 1;
            }
            '}' => {
                toks.push((Tok::RBrace, line));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, line));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, line));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Eq, line));
                i += 1;
            }
            ';' | ',' => {
                toks.push((Tok::Sep, line));
                i += 1;
            }
            '"' => {
                let start = line;
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(Error::Parse {
                                line: start,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') if chars.get(i + 1) == Some(&'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(&ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                toks.push((Tok::Id(s), start));
            }
            c if is_id_char(c) => {
                let mut s = String::new();
                while i < chars.len() && is_id_char(chars[i]) {
                    // `a->b` without spaces: stop before the arrow.
                    if chars[i] == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
                        break;
                    }
                    s.push(chars[i]);
                    i += 1;
                }
                toks.push((Tok::Id(s), line));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

fn is_id_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '/')
}

struct DotParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |(_, l)| *l)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line(),
            message: message.into(),
        })
    }

    fn expect_id(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => {
                self.pos -= 1;
                self.error(format!("expected identifier, found {other:?}"))
            }
        }
    }

    fn attributes(&mut self) -> Result<Vec<(String, String, usize)>> {
        let mut attrs = Vec::new();
        if self.peek() != Some(&Tok::LBracket) {
            return Ok(attrs);
        }
        self.next();
        loop {
            match self.peek() {
                Some(Tok::RBracket) => {
                    self.next();
                    return Ok(attrs);
                }
                Some(Tok::Sep) => {
                    self.next();
                }
                Some(Tok::Id(_)) => {
                    let line = self.line();
                    let key = self.expect_id()?;
                    if self.next() != Some(Tok::Eq) {
                        self.pos -= 1;
                        return self.error(format!("expected `=` after attribute `{key}`"));
                    }
                    let value = self.expect_id()?;
                    attrs.push((key, value, line));
                }
                _ => return self.error("unterminated attribute list"),
            }
        }
    }

    fn parse(mut self) -> Result<RawGraph> {
        let mut g = RawGraph::default();
        if let Some(Tok::Id(s)) = self.peek() {
            if s.eq_ignore_ascii_case("strict") {
                self.next();
            }
        }
        match self.next() {
            Some(Tok::Id(s)) if s.eq_ignore_ascii_case("digraph") => {}
            Some(Tok::Id(s)) if s.eq_ignore_ascii_case("graph") => {
                self.pos -= 1;
                return self.error("undirected graphs are not supported");
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return self.error("expected `digraph`");
            }
        }
        if let Some(Tok::Id(_)) = self.peek() {
            self.next();
        }
        if self.next() != Some(Tok::LBrace) {
            self.pos -= 1;
            return self.error("expected `{`");
        }
        loop {
            match self.peek() {
                None => return self.error("missing closing `}`"),
                Some(Tok::RBrace) => {
                    self.next();
                    break;
                }
                Some(Tok::Sep) => {
                    self.next();
                }
                Some(Tok::Id(_)) => self.statement(&mut g)?,
                Some(t) => {
                    let t = t.clone();
                    return self.error(format!("unexpected token {t:?}"));
                }
            }
        }
        if self.peek().is_some() {
            return self.error("trailing input after closing `}`");
        }
        Ok(g)
    }

    fn statement(&mut self, g: &mut RawGraph) -> Result<()> {
        let line = self.line();
        let first = self.expect_id()?;
        let keyword = first.to_ascii_lowercase();
        if matches!(keyword.as_str(), "graph" | "node" | "edge") && self.peek() == Some(&Tok::LBracket) {
            self.attributes()?;
            return Ok(());
        }
        if self.peek() == Some(&Tok::Eq) {
            self.next();
            self.expect_id()?;
            return Ok(());
        }
        let mut chain = vec![(first, line)];
        loop {
            match self.peek() {
                Some(Tok::Arrow) => {
                    self.next();
                    let l = self.line();
                    chain.push((self.expect_id()?, l));
                }
                Some(Tok::UndirectedEdge) => return self.error("undirected edge `--` in a digraph"),
                _ => break,
            }
        }
        let attrs = self.attributes()?;
        let mut weight = Rational::one();
        for (key, value, l) in attrs {
            if key == "weight" {
                weight = parse_weight(&value, l)?;
            }
        }
        if chain.len() == 1 {
            g.vertices.push(chain.pop().unwrap().0);
            return Ok(());
        }
        for pair in chain.windows(2) {
            g.edges.push(RawEdge {
                line: pair[1].1,
                src: pair[0].0.clone(),
                dst: pair[1].0.clone(),
                weight: weight.clone(),
            });
        }
        Ok(())
    }
}

fn parse_dot(text: &str) -> Result<RawGraph> {
    let toks = tokenize_dot(text)?;
    DotParser { toks, pos: 0 }.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    const G7: &str = "1 2\n1 6\n3 4\n4 5\n5 3\n3 7\n6 7\n7 6\n";

    #[test]
    fn g7_edge_list() {
        let g = parse_graph(G7, GraphFormat::EdgeList).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.edges().len(), 8);
        assert_eq!(g.vertex_ids(), ["1", "2", "3", "4", "5", "6", "7"]);
    }

    #[test]
    fn minimal_graph() {
        let g = parse_graph("a b", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].weight, Rational::one());
        assert_eq!((g.edges()[0].src, g.edges()[0].dst), (0, 1));
    }

    #[test]
    fn comments_blank_lines_and_rational_weights() {
        let text = "# header\n\na b 1/2   # half\n b c 0.25\n";
        let g = parse_graph(text, GraphFormat::EdgeList).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(&Rational::new(1.into(), 2.into())));
        assert_eq!(g.edge_weight(1, 2), Some(&Rational::new(1.into(), 4.into())));
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        assert_eq!(
            parse_graph("a b -1", GraphFormat::EdgeList),
            Err(Error::BadWeight {
                line: 1,
                weight: "-1".into()
            })
        );
        assert!(matches!(
            parse_graph("a b 0", GraphFormat::EdgeList),
            Err(Error::BadWeight { line: 1, .. })
        ));
        assert_eq!(
            parse_graph("a b\nc d\na b 2\n", GraphFormat::EdgeList),
            Err(Error::DuplicateEdge {
                line: 3,
                src: "a".into(),
                dst: "b".into()
            })
        );
        assert!(matches!(
            parse_graph("a b\nlonely\n", GraphFormat::EdgeList),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("a b x", GraphFormat::EdgeList),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_graph("  \n# only\n", GraphFormat::EdgeList),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn dot_subset() {
        let text = r#"
            strict digraph G7 {
                // information flows along the arrows
                node [shape=circle];
                1 -> 2; 1 -> 6
                3 -> 4 -> 5 -> 3;
                3 -> 7 [weight=1];
                6 -> 7; 7->6
                /* isolated */ "8"
            }"#;
        let g = parse_graph(text, GraphFormat::DotSubset).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.edges().len(), 8);
        let g7 = parse_graph(G7, GraphFormat::EdgeList).unwrap();
        assert_eq!(g.induced(&[0, 1, 2, 3, 4, 5, 6]), g7);
    }

    #[test]
    fn dot_weights_and_errors() {
        let g = parse_graph("digraph { a -> b [label=x, weight=\"3/2\"] }", GraphFormat::DotSubset).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(&Rational::new(3.into(), 2.into())));
        assert!(matches!(
            parse_graph("digraph {\n a -> b [weight=-2]\n}", GraphFormat::DotSubset),
            Err(Error::BadWeight { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("graph { a -- b }", GraphFormat::DotSubset),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_graph("digraph {\n a -> b\n", GraphFormat::DotSubset),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_graph("digraph { a -> b; a -> b }", GraphFormat::DotSubset),
            Err(Error::DuplicateEdge { .. })
        ));
    }
}
