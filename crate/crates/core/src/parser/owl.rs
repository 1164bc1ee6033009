//! OWL functional-style syntax subset.
//!
//! Recognised: `Prefix`, `Ontology`, `Declaration`, `SubClassOf`,
//! `EquivalentClasses`, `DisjointClasses`, `ClassAssertion`,
//! `AnnotationAssertion` and `ObjectSomeValuesFrom` inside class expressions.
//! Anything else is skipped with a warning.

use std::io::BufRead;
use std::path::Path;

use super::lexer::{Lexer, Token, TokenKind};
use super::{for_each_line, Diagnostics, Parsed, INLINE_SOURCE};
use crate::error::Result;
use crate::iri::{Iri, PrefixMap, XSD};
use crate::kb::{
    AnnotationAxiom, AxiomKind, ClassExpression, KnowledgeBase, Literal, LiteralKind, LogicalAxiom,
};

pub fn parse_ontology(text: &str) -> Result<Parsed<KnowledgeBase>> {
    parse_ontology_reader(text.as_bytes(), Path::new(INLINE_SOURCE))
}

pub fn parse_ontology_bytes(bytes: &[u8]) -> Result<Parsed<KnowledgeBase>> {
    parse_ontology_reader(bytes, Path::new(INLINE_SOURCE))
}

pub fn parse_ontology_reader<R: BufRead>(reader: R, file: &Path) -> Result<Parsed<KnowledgeBase>> {
    parse_ontology_with_prefixes(reader, file, &PrefixMap::empty())
}

/// Like [`parse_ontology_reader`], with `extra` prefixes usable without a
/// `Prefix(...)` declaration. Declarations in the document take precedence.
pub fn parse_ontology_with_prefixes<R: BufRead>(
    reader: R,
    file: &Path,
    extra: &PrefixMap,
) -> Result<Parsed<KnowledgeBase>> {
    let mut state = DocState::new(file);
    state.prefixes.extend(extra);
    state.declared.extend(extra);
    let mut lexer = Lexer::new();
    let mut tokens = Vec::new();
    let total_lines = for_each_line(reader, |lineno, line| {
        let line = match line {
            Ok(l) => l,
            Err(()) => {
                state.diags.error(lineno, "line is not valid UTF-8");
                return;
            }
        };
        tokens.clear();
        if let Err(e) = lexer.feed(line, lineno, &mut tokens) {
            state.diags.error(e.line, e.message);
        }
        for tok in tokens.drain(..) {
            state.push_token(tok);
        }
    })?;
    if let Some(start) = lexer.pending_literal() {
        state.diags.error(start, "malformed literal: unterminated string");
    }
    state.finish(total_lines)
}

#[derive(Debug)]
enum Node {
    Term(Token),
    Group(Group),
}

#[derive(Debug)]
struct Group {
    keyword: String,
    line: usize,
    args: Vec<Node>,
}

struct Frame {
    group: Group,
    /// `Ontology(...)`: children are processed as they complete.
    container: bool,
}

struct DocState {
    diags: Diagnostics,
    prefixes: PrefixMap,
    declared: PrefixMap,
    kb: KnowledgeBase,
    stack: Vec<Frame>,
    pending_name: Option<Token>,
}

/// Recoverable problem inside one axiom.
enum Problem {
    Error(usize, String),
    Unsupported(usize, String),
}

type Conv<T> = std::result::Result<T, Problem>;

impl DocState {
    fn new(file: &Path) -> Self {
        DocState {
            diags: Diagnostics::new(file),
            prefixes: PrefixMap::standard(),
            declared: PrefixMap::empty(),
            kb: KnowledgeBase::new(),
            stack: Vec::new(),
            pending_name: None,
        }
    }

    fn push_token(&mut self, tok: Token) {
        match tok.kind {
            TokenKind::LParen => match self.pending_name.take() {
                Some(Token {
                    kind: TokenKind::Name(keyword),
                    line,
                }) => {
                    let container = keyword == "Ontology" && self.stack.is_empty();
                    self.stack.push(Frame {
                        group: Group {
                            keyword,
                            line,
                            args: Vec::new(),
                        },
                        container,
                    });
                }
                _ => {
                    self.diags.error(tok.line, "unexpected '(' without a constructor name");
                    // keep nesting balanced so the matching ')' is absorbed
                    self.stack.push(Frame {
                        group: Group {
                            keyword: String::new(),
                            line: tok.line,
                            args: Vec::new(),
                        },
                        container: false,
                    });
                }
            },
            TokenKind::RParen => {
                self.flush_pending();
                let Some(frame) = self.stack.pop() else {
                    self.diags
                        .error(tok.line, "unbalanced parentheses: unexpected ')'");
                    return;
                };
                if frame.container {
                    return;
                }
                self.complete(frame.group);
            }
            TokenKind::Name(_) => {
                self.flush_pending();
                self.pending_name = Some(tok);
            }
            _ => {
                self.flush_pending();
                self.add_term(tok);
            }
        }
    }

    fn flush_pending(&mut self) {
        if let Some(tok) = self.pending_name.take() {
            self.add_term(tok);
        }
    }

    fn add_term(&mut self, tok: Token) {
        match self.stack.last_mut() {
            Some(frame) if frame.container => {
                // ontology IRI / version IRI
                if !matches!(tok.kind, TokenKind::FullIri(_)) {
                    self.diags
                        .warn(tok.line, "unexpected token in ontology header ignored");
                }
            }
            Some(frame) => frame.group.args.push(Node::Term(tok)),
            None => {
                if !matches!(tok.kind, TokenKind::Equals) {
                    self.diags
                        .error(tok.line, "unexpected token outside of an axiom");
                }
            }
        }
    }

    fn complete(&mut self, group: Group) {
        match self.stack.last_mut() {
            Some(frame) if !frame.container => frame.group.args.push(Node::Group(group)),
            _ => self.process_item(group),
        }
    }

    fn finish(mut self, total_lines: usize) -> Result<Parsed<KnowledgeBase>> {
        self.flush_pending();
        if let Some(frame) = self.stack.first() {
            let line = frame.group.line.min(total_lines.max(1));
            self.diags.error(
                line,
                format!(
                    "unbalanced parentheses: '{}(' is never closed",
                    frame.group.keyword
                ),
            );
        }
        let mut kb = self.kb.normalize();
        let mut prefixes = PrefixMap::standard();
        prefixes.extend(&self.declared);
        kb.prefixes = prefixes;
        self.diags.finish(kb)
    }

    fn process_item(&mut self, group: Group) {
        let line = group.line;
        let result = match group.keyword.as_str() {
            "Prefix" => self.prefix_decl(group),
            "Import" => Err(Problem::Unsupported(line, "imports are not followed".into())),
            // ontology-level annotation
            "Annotation" => Ok(()),
            "Declaration" => self.declaration(group),
            "SubClassOf" => self.subclass_of(group),
            "EquivalentClasses" => self.equivalent_classes(group),
            "DisjointClasses" => self.disjoint_classes(group),
            "ClassAssertion" => self.class_assertion(group),
            "AnnotationAssertion" => self.annotation_assertion(group),
            "" => Ok(()),
            other => Err(Problem::Unsupported(
                line,
                format!("unsupported axiom kind {other} skipped"),
            )),
        };
        match result {
            Ok(()) => {}
            Err(Problem::Error(line, msg)) => self.diags.error(line, msg),
            Err(Problem::Unsupported(line, msg)) => self.diags.warn(line, msg),
        }
    }

    fn prefix_decl(&mut self, group: Group) -> Conv<()> {
        let bad = || Problem::Error(group.line, "malformed Prefix declaration".into());
        let mut it = group.args.iter();
        let name = match it.next() {
            Some(Node::Term(Token {
                kind: TokenKind::Name(n),
                ..
            })) => n.strip_suffix(':').ok_or_else(bad)?.to_string(),
            _ => return Err(bad()),
        };
        match it.next() {
            Some(Node::Term(Token {
                kind: TokenKind::Equals,
                ..
            })) => {}
            _ => return Err(bad()),
        }
        let ns = match it.next() {
            Some(Node::Term(Token {
                kind: TokenKind::FullIri(ns),
                ..
            })) => ns.clone(),
            _ => return Err(bad()),
        };
        if it.next().is_some() {
            return Err(bad());
        }
        self.prefixes.insert(name.clone(), ns.clone());
        self.declared.insert(name, ns);
        Ok(())
    }

    fn iri(&self, node: &Node) -> Conv<Iri> {
        match node {
            Node::Term(Token { kind, line }) => {
                let raw = match kind {
                    TokenKind::FullIri(s) => s.clone(),
                    TokenKind::Name(n) => {
                        if n.starts_with("_:") {
                            return Err(Problem::Unsupported(
                                *line,
                                "anonymous individuals are not supported".into(),
                            ));
                        }
                        match n.split_once(':') {
                            Some((prefix, _)) => self.prefixes.expand_strict(n).ok_or_else(|| {
                                Problem::Error(*line, format!("undeclared prefix '{prefix}:'"))
                            })?,
                            None => {
                                return Err(Problem::Error(
                                    *line,
                                    format!("expected an IRI, found {n:?}"),
                                ))
                            }
                        }
                    }
                    _ => return Err(Problem::Error(*line, "expected an IRI".into())),
                };
                Iri::new(raw).map_err(|e| Problem::Error(*line, e.to_string()))
            }
            Node::Group(g) => Err(Problem::Error(
                g.line,
                format!("expected an IRI, found {}(...)", g.keyword),
            )),
        }
    }

    fn class_expression(&self, node: &Node) -> Conv<ClassExpression> {
        match node {
            Node::Term(_) => Ok(ClassExpression::Named(self.iri(node)?)),
            Node::Group(g) if g.keyword == "ObjectSomeValuesFrom" => {
                if g.args.len() != 2 {
                    return Err(Problem::Error(
                        g.line,
                        "ObjectSomeValuesFrom takes a property and a class expression".into(),
                    ));
                }
                if let Node::Group(inner) = &g.args[0] {
                    return Err(Problem::Unsupported(
                        inner.line,
                        format!("property expression {} not supported", inner.keyword),
                    ));
                }
                let relation = self.iri(&g.args[0])?;
                let filler = self.class_expression(&g.args[1])?;
                Ok(ClassExpression::some(relation, filler))
            }
            Node::Group(g) => Err(Problem::Unsupported(
                g.line,
                format!("class expression {} not supported; axiom skipped", g.keyword),
            )),
        }
    }

    /// Arguments after any leading axiom annotations.
    fn operands(group: &Group) -> &[Node] {
        let skip = group
            .args
            .iter()
            .take_while(|n| matches!(n, Node::Group(g) if g.keyword == "Annotation"))
            .count();
        &group.args[skip..]
    }

    fn declaration(&mut self, group: Group) -> Conv<()> {
        let [Node::Group(entity)] = Self::operands(&group) else {
            return Err(Problem::Error(group.line, "malformed Declaration".into()));
        };
        let [arg] = entity.args.as_slice() else {
            return Err(Problem::Error(entity.line, "malformed Declaration".into()));
        };
        let iri = self.iri(arg)?;
        match entity.keyword.as_str() {
            "Class" => self.kb.declare_class(iri),
            "ObjectProperty" | "AnnotationProperty" | "DataProperty" => {
                self.kb.declare_property(iri)
            }
            "NamedIndividual" => self.kb.declare_individual(iri),
            "Datatype" => {}
            other => {
                return Err(Problem::Unsupported(
                    entity.line,
                    format!("unsupported declaration {other}"),
                ))
            }
        }
        Ok(())
    }

    fn subclass_of(&mut self, group: Group) -> Conv<()> {
        let [sub, sup] = Self::operands(&group) else {
            return Err(Problem::Error(group.line, "SubClassOf takes two class expressions".into()));
        };
        let sub = match self.class_expression(sub)? {
            ClassExpression::Named(iri) => iri,
            _ => {
                return Err(Problem::Unsupported(
                    group.line,
                    "SubClassOf with a complex subclass skipped".into(),
                ))
            }
        };
        let sup = self.class_expression(sup)?;
        if sup.as_named() == Some(&sub) {
            self.kb.declare_class(sub);
            return Err(Problem::Unsupported(group.line, "trivial SubClassOf skipped".into()));
        }
        self.kb
            .add_logical(LogicalAxiom::asserted(AxiomKind::SubClassOf, sub, sup));
        Ok(())
    }

    fn equivalent_classes(&mut self, group: Group) -> Conv<()> {
        let ops = Self::operands(&group);
        if ops.len() < 2 {
            return Err(Problem::Error(
                group.line,
                "EquivalentClasses takes at least two class expressions".into(),
            ));
        }
        let exprs = ops
            .iter()
            .map(|n| self.class_expression(n))
            .collect::<Conv<Vec<_>>>()?;
        let Some(pos) = exprs.iter().position(|e| e.as_named().is_some()) else {
            return Err(Problem::Unsupported(
                group.line,
                "EquivalentClasses without a named class skipped".into(),
            ));
        };
        let subject = exprs[pos].as_named().cloned().expect("position checked");
        for (i, e) in exprs.into_iter().enumerate() {
            if i != pos {
                self.kb.add_logical(LogicalAxiom::asserted(
                    AxiomKind::EquivalentClasses,
                    subject.clone(),
                    e,
                ));
            }
        }
        Ok(())
    }

    fn disjoint_classes(&mut self, group: Group) -> Conv<()> {
        let ops = Self::operands(&group);
        if ops.len() < 2 {
            return Err(Problem::Error(
                group.line,
                "DisjointClasses takes at least two classes".into(),
            ));
        }
        let mut named = Vec::with_capacity(ops.len());
        for n in ops {
            match self.class_expression(n)? {
                ClassExpression::Named(iri) => named.push(iri),
                _ => {
                    return Err(Problem::Unsupported(
                        group.line,
                        "DisjointClasses over complex expressions skipped".into(),
                    ))
                }
            }
        }
        for i in 0..named.len() {
            for j in i + 1..named.len() {
                self.kb
                    .add_logical(LogicalAxiom::disjoint(named[i].clone(), named[j].clone()));
            }
        }
        Ok(())
    }

    fn class_assertion(&mut self, group: Group) -> Conv<()> {
        let [class, individual] = Self::operands(&group) else {
            return Err(Problem::Error(
                group.line,
                "ClassAssertion takes a class expression and an individual".into(),
            ));
        };
        let class = self.class_expression(class)?;
        let individual = self.iri(individual)?;
        self.kb.add_logical(LogicalAxiom::instance_of(individual, class));
        Ok(())
    }

    fn annotation_assertion(&mut self, group: Group) -> Conv<()> {
        let [property, subject, value] = Self::operands(&group) else {
            return Err(Problem::Error(
                group.line,
                "AnnotationAssertion takes a property, a subject and a value".into(),
            ));
        };
        let property = self.iri(property)?;
        let subject = self.iri(subject)?;
        let value = match value {
            Node::Term(Token {
                kind:
                    TokenKind::Literal {
                        lexical, datatype, ..
                    },
                line,
            }) => {
                if lexical.trim().is_empty() {
                    return Err(Problem::Unsupported(*line, "empty annotation value skipped".into()));
                }
                let kind = match datatype {
                    Some(dt) => {
                        let expanded = self.prefixes.expand_strict(dt).ok_or_else(|| {
                            Problem::Error(*line, format!("malformed literal: undeclared datatype {dt}"))
                        })?;
                        literal_kind(&expanded)
                    }
                    None => LiteralKind::String,
                };
                Literal {
                    lexical: lexical.clone(),
                    kind,
                }
            }
            node => Literal {
                lexical: self.iri(node)?.into_string(),
                kind: LiteralKind::Iri,
            },
        };
        self.kb
            .add_annotation(AnnotationAxiom::new(subject, property, value));
        Ok(())
    }
}

fn literal_kind(datatype: &str) -> LiteralKind {
    let Some(local) = datatype.strip_prefix(XSD) else {
        return LiteralKind::String;
    };
    match local {
        "date" | "dateTime" | "dateTimeStamp" | "time" | "gYear" | "gYearMonth" | "gMonthDay"
        | "gDay" | "gMonth" => LiteralKind::Date,
        "integer" | "int" | "long" | "short" | "byte" | "decimal" | "double" | "float"
        | "nonNegativeInteger" | "positiveInteger" | "negativeInteger" | "nonPositiveInteger"
        | "unsignedInt" | "unsignedLong" | "unsignedShort" | "unsignedByte" => LiteralKind::Number,
        _ => LiteralKind::String,
    }
}
