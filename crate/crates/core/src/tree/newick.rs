//! Newick reading and writing.
//!
//! The accepted grammar is deliberately small:
//!
//! ```text
//! tree    := subtree ";"
//! subtree := leaf | "(" subtree ":" weight ("," subtree ":" weight)+ ")"
//! leaf    := integer label
//! weight  := decimal | integer "/" integer
//! ```
//!
//! The root subtree carries no weight. Weights are parsed exactly; decimals
//! never go through floating point. Serialization is canonical: children are
//! emitted ordered by the smallest leaf label below them and weights are
//! printed in lowest terms, so parsing followed by serializing is the
//! identity on canonical strings.

use num_rational::BigRational;
use thiserror::Error;

use super::{NodeId, Tree, TreeBuilder, TreeError};
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewickError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid weight `{text}` at byte {position}")]
    InvalidWeight { position: usize, text: String },
    #[error("invalid leaf tree: {0}")]
    Tree(#[from] TreeError),
}

/// Parses a single Newick tree.
pub fn parse_newick(text: &str) -> Result<Tree, NewickError> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        builder: TreeBuilder::new(),
    };
    parser.skip_whitespace();
    let root = parser.parse_subtree()?;
    parser.expect(b';')?;
    parser.skip_whitespace();
    if parser.pos != parser.bytes.len() {
        return Err(NewickError::Syntax {
            position: parser.pos,
            message: "trailing input after ';'".into(),
        });
    }
    Ok(parser.builder.finish(root)?)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    builder: TreeBuilder,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), NewickError> {
        self.skip_whitespace();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{}'", byte as char)))
        }
    }

    fn syntax(&self, message: String) -> NewickError {
        NewickError::Syntax {
            position: self.pos,
            message,
        }
    }

    fn parse_subtree(&mut self) -> Result<NodeId, NewickError> {
        self.skip_whitespace();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    let child = self.parse_subtree()?;
                    self.expect(b':')?;
                    let weight = self.parse_weight()?;
                    children.push((child, weight));
                    self.skip_whitespace();
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.syntax("expected ',' or ')'".into())),
                    }
                }
                if children.len() < 2 {
                    return Err(self.syntax("internal node needs at least two children".into()));
                }
                Ok(self.builder.add_internal(children)?)
            }
            Some(b) if b.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let label: u32 = text.parse().map_err(|_| NewickError::Syntax {
                    position: start,
                    message: format!("leaf label `{text}` out of range"),
                })?;
                Ok(self.builder.add_leaf(label))
            }
            _ => Err(self.syntax("expected '(' or a leaf label".into())),
        }
    }

    fn parse_weight(&mut self) -> Result<BigRational, NewickError> {
        self.skip_whitespace();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'.' || b == b'/') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        parse_rational(text).map_err(|_| NewickError::InvalidWeight {
            position: start,
            text: text.to_string(),
        })
    }
}

/// Serializes a tree in canonical form.
pub fn serialize_newick(tree: &Tree) -> String {
    let min_leaf = tree.min_leaf_below();
    let mut out = String::new();
    write_subtree(tree, tree.root(), &min_leaf, &mut out);
    out.push(';');
    out
}

fn write_subtree(tree: &Tree, id: NodeId, min_leaf: &[u32], out: &mut String) {
    if let Some(label) = tree.label(id) {
        out.push_str(&label.to_string());
        return;
    }
    let mut children: Vec<NodeId> = tree.children(id).to_vec();
    children.sort_by_key(|&c| min_leaf[c]);
    out.push('(');
    for (i, child) in children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_subtree(tree, *child, min_leaf, out);
        out.push(':');
        out.push_str(&format_rational(
            tree.edge_weight(*child).expect("non-root edge"),
        ));
    }
    out.push(')');
}
