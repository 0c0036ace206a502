//! Reader and printer for the `.scc` declaration syntax.
//!
//! ```text
//! spec        := form*
//! form        := "(define-source" NAME TYPE ")" | "(define-action" NAME TYPE ")"
//!              | "(define-context" NAME TYPE "[" ctxcontract "]" ")"
//!              | "(define-controller" NAME "[" "when-provided" NAME "do" NAME "]" ")"
//! ctxcontract := "when-required" ("get" NAME)?
//!              | "when-provided" NAME ("get" NAME)? ("always_publish" | "maybe_publish")
//! TYPE        := "Bool" | "Int" | "String" | "Picture"
//! ```
//!
//! `;` starts a comment that runs to the end of the line.

use std::fmt;

use thiserror::Error;

use crate::spec::{
    is_identifier, ComponentName, DataType, Declaration, InteractionContract, PublishSpec,
    Specification,
};

/// Text plus where it came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    pub content: String,
    pub origin: String,
}

impl SourceText {
    pub fn new(content: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceText {
            content: content.into(),
            origin: origin.into(),
        }
    }

    pub fn memory(content: impl Into<String>) -> Self {
        SourceText::new(content, "<memory>")
    }
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax {
        expected: String,
        found: String,
        hint: Option<&'static str>,
    },
    UnknownKeyword(String),
    UnknownType(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub origin: String,
    pub pos: Position,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax { .. } => "PARSE_ERROR",
            ParseErrorKind::UnknownKeyword(_) => "UNKNOWN_KEYWORD",
            ParseErrorKind::UnknownType(_) => "UNKNOWN_TYPE",
        }
    }

    pub fn message(&self) -> String {
        match &self.kind {
            ParseErrorKind::Syntax {
                expected,
                found,
                hint,
            } => {
                let mut msg = format!("expected {expected}, found {found}");
                if let Some(hint) = hint {
                    msg.push_str(" (");
                    msg.push_str(hint);
                    msg.push(')');
                }
                msg
            }
            ParseErrorKind::UnknownKeyword(k) => format!("unknown keyword `{k}`"),
            ParseErrorKind::UnknownType(t) => {
                format!("unknown type `{t}`, expected one of Bool, Int, String, Picture")
            }
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.origin,
            self.pos,
            self.code(),
            self.message()
        )
    }
}

/// A parsed specification with the position of each declaration's opening
/// parenthesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub spec: Specification,
    pub positions: Vec<Position>,
}

const KEYWORDS: &[&str] = &[
    "define-source",
    "define-action",
    "define-context",
    "define-controller",
    "when-required",
    "when-provided",
    "get",
    "do",
    "always_publish",
    "maybe_publish",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    OpenBracket,
    CloseBracket,
    Atom(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
            Tok::OpenBracket => f.write_str("`[`"),
            Tok::CloseBracket => f.write_str("`]`"),
            Tok::Atom(a) => write!(f, "`{a}`"),
        }
    }
}

fn lex(text: &str) -> Vec<(Tok, Position)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let pos = Position { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            continue;
        }
        col += 1;
        match c {
            ';' => while chars.next_if(|&c| c != '\n').is_some() {},
            c if c.is_whitespace() => {}
            '(' => out.push((Tok::Open, pos)),
            ')' => out.push((Tok::Close, pos)),
            '[' => out.push((Tok::OpenBracket, pos)),
            ']' => out.push((Tok::CloseBracket, pos)),
            c => {
                let mut atom = String::from(c);
                while let Some(c) = chars.next_if(|&c| !c.is_whitespace() && !"()[];".contains(c)) {
                    atom.push(c);
                    col += 1;
                }
                out.push((Tok::Atom(atom), pos));
            }
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<(Tok, Position)>,
    at: usize,
    origin: &'a str,
    end: Position,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Position {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_owned(), Tok::to_string)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            origin: self.origin.to_owned(),
            pos: self.pos(),
            kind,
        }
    }

    fn syntax(&self, expected: &str, hint: Option<&'static str>) -> ParseError {
        self.error(ParseErrorKind::Syntax {
            expected: expected.to_owned(),
            found: self.found(),
            hint,
        })
    }

    /// Error for an unexpected token in keyword position.
    fn keyword_error(&self, expected: &str, hint: Option<&'static str>) -> ParseError {
        match self.peek() {
            Some(Tok::Atom(a)) if !KEYWORDS.contains(&a.as_str()) => {
                self.error(ParseErrorKind::UnknownKeyword(a.clone()))
            }
            _ => self.syntax(expected, hint),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        match self.peek() {
            Some(Tok::Atom(a)) if a == kw => {
                self.at += 1;
                true
            }
            _ => false,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.syntax(&tok.to_string(), None))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.keyword_error(&format!("`{kw}`"), None))
        }
    }

    fn name(&mut self) -> Result<ComponentName, ParseError> {
        match self.peek() {
            Some(Tok::Atom(a)) if is_identifier(a) => {
                let name = ComponentName::new(a.clone()).expect("checked identifier");
                self.at += 1;
                Ok(name)
            }
            _ => Err(self.syntax("component name", None)),
        }
    }

    fn data_type(&mut self) -> Result<DataType, ParseError> {
        match self.peek() {
            Some(Tok::Atom(a)) => match a.parse() {
                Ok(t) => {
                    self.at += 1;
                    Ok(t)
                }
                Err(_) => Err(self.error(ParseErrorKind::UnknownType(a.clone()))),
            },
            _ => Err(self.syntax("type", None)),
        }
    }

    fn optional_get(&mut self) -> Result<Option<ComponentName>, ParseError> {
        if self.eat_keyword("get") {
            Ok(Some(self.name()?))
        } else {
            Ok(None)
        }
    }

    fn context_contract(&mut self) -> Result<InteractionContract, ParseError> {
        self.expect(Tok::OpenBracket)?;
        let contract = if self.eat_keyword("when-required") {
            let get = self.optional_get()?;
            if !matches!(self.peek(), Some(Tok::CloseBracket)) {
                let expected = if get.is_some() { "`]`" } else { "`get` or `]`" };
                let hint = match self.peek() {
                    Some(Tok::Atom(a)) if a == "always_publish" || a == "maybe_publish" => {
                        Some("when-required contexts have no publish specification")
                    }
                    _ => None,
                };
                return Err(self.keyword_error(expected, hint));
            }
            InteractionContract::when_required(get)
        } else if self.eat_keyword("when-provided") {
            let trigger = self.name()?;
            let get = self.optional_get()?;
            let publish = if self.eat_keyword("always_publish") {
                PublishSpec::AlwaysPublish
            } else if self.eat_keyword("maybe_publish") {
                PublishSpec::MaybePublish
            } else {
                let expected = if get.is_some() {
                    "`always_publish` or `maybe_publish`"
                } else {
                    "`get`, `always_publish` or `maybe_publish`"
                };
                return Err(self.keyword_error(expected, None));
            };
            InteractionContract::when_provided(trigger, get, publish)
        } else {
            return Err(self.keyword_error("`when-required` or `when-provided`", None));
        };
        self.expect(Tok::CloseBracket)?;
        Ok(contract)
    }

    fn form(&mut self) -> Result<Declaration, ParseError> {
        self.expect(Tok::Open)?;
        let head = match self.peek() {
            Some(Tok::Atom(a)) => a.clone(),
            _ => return Err(self.syntax("declaration keyword", None)),
        };
        let decl = match head.as_str() {
            "define-source" | "define-action" => {
                self.at += 1;
                let name = self.name()?;
                let ty = self.data_type()?;
                if head == "define-source" {
                    Declaration::Source { name, out_type: ty }
                } else {
                    Declaration::Action { name, in_type: ty }
                }
            }
            "define-context" => {
                self.at += 1;
                let name = self.name()?;
                let out_type = self.data_type()?;
                let contract = self.context_contract()?;
                Declaration::Context {
                    name,
                    out_type,
                    contract,
                }
            }
            "define-controller" => {
                self.at += 1;
                let name = self.name()?;
                self.expect(Tok::OpenBracket)?;
                self.expect_keyword("when-provided")?;
                let trigger = self.name()?;
                self.expect_keyword("do")?;
                let action = self.name()?;
                self.expect(Tok::CloseBracket)?;
                Declaration::Controller {
                    name,
                    trigger,
                    action,
                }
            }
            _ => {
                return Err(self.keyword_error(
                    "`define-source`, `define-action`, `define-context` or `define-controller`",
                    None,
                ))
            }
        };
        self.expect(Tok::Close)?;
        Ok(decl)
    }
}

/// Parse a specification, keeping declaration positions. Cross-references
/// are not checked here.
pub fn parse_located(text: &SourceText) -> Result<Located, ParseError> {
    let end = {
        let line = text.content.matches('\n').count() + 1;
        let last = text.content.rsplit('\n').next().unwrap_or("");
        Position {
            line,
            col: last.chars().count() + 1,
        }
    };
    let mut p = Parser {
        toks: lex(&text.content),
        at: 0,
        origin: &text.origin,
        end,
    };
    let mut spec = Specification::default();
    let mut positions = Vec::new();
    while p.peek().is_some() {
        positions.push(p.pos());
        spec.declarations.push(p.form()?);
    }
    Ok(Located { spec, positions })
}

pub fn parse(text: &SourceText) -> Result<Specification, ParseError> {
    parse_located(text).map(|l| l.spec)
}

pub fn parse_str(text: &str) -> Result<Specification, ParseError> {
    parse(&SourceText::memory(text))
}

/// Canonical one-line form of a declaration.
pub fn format_declaration(decl: &Declaration) -> String {
    match decl {
        Declaration::Source { name, out_type } => format!("(define-source {name} {out_type})"),
        Declaration::Action { name, in_type } => format!("(define-action {name} {in_type})"),
        Declaration::Context {
            name,
            out_type,
            contract,
        } => {
            let mut body = match &contract.activation {
                crate::spec::Activation::WhenRequired => "when-required".to_owned(),
                crate::spec::Activation::WhenProvided(t) => format!("when-provided {t}"),
            };
            if let Some(g) = &contract.get {
                body.push_str(" get ");
                body.push_str(g.as_str());
            }
            match contract.publish {
                PublishSpec::NoPublish => {}
                PublishSpec::AlwaysPublish => body.push_str(" always_publish"),
                PublishSpec::MaybePublish => body.push_str(" maybe_publish"),
            }
            format!("(define-context {name} {out_type} [{body}])")
        }
        Declaration::Controller {
            name,
            trigger,
            action,
        } => format!("(define-controller {name} [when-provided {trigger} do {action}])"),
    }
}

/// One declaration per line, each terminated by a newline.
pub fn pretty_print(spec: &Specification) -> String {
    spec.declarations
        .iter()
        .map(|d| format_declaration(d) + "\n")
        .collect()
}
