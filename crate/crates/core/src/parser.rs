//! Concrete syntax: lexer, recursive-descent parser and the symbol registry.
//!
//! Precedence from tightest to loosest: prefix operators (`~`, `B[a]`,
//! `Bhat[a]`, `[act]`, `<act>`), `&`, `|`, `->` (right associative), `<->`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::action::{ActionType, LiteralConj, PointedAction};
use crate::derived::{self, SurpriseKind};
use crate::formula::{is_identifier, Action, AgentId, Formula, Literal, PropId};
use crate::kripke::Model;

/// Words that cannot name agents or propositions.
pub const RESERVED: &[&str] =
    &["true", "false", "obs", "B", "Bhat", "tell", "show", "Sim", "Dis", "O", "Os", "Bs", "Surprise"];

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// Declared agents, propositions and named action models.
#[derive(Clone, Default, Debug)]
pub struct Registry {
    agents: Vec<AgentId>,
    props: Vec<PropId>,
    actions: BTreeMap<String, Arc<PointedAction>>,
}

impl Registry {
    pub fn new<A, P>(agents: impl IntoIterator<Item = A>, props: impl IntoIterator<Item = P>) -> Self
    where
        A: Into<AgentId>,
        P: Into<PropId>,
    {
        let mut r = Registry::default();
        for a in agents {
            r.add_agent(a.into());
        }
        for p in props {
            r.add_prop(p.into());
        }
        r
    }

    pub fn from_model(model: &Model) -> Self {
        Registry::new(model.agents().iter().cloned(), model.props().iter().cloned())
    }

    pub fn add_agent(&mut self, agent: AgentId) {
        if !self.agents.contains(&agent) {
            self.agents.push(agent);
        }
    }

    pub fn add_prop(&mut self, prop: PropId) {
        if !self.props.contains(&prop) {
            self.props.push(prop);
        }
    }

    pub fn add_action(&mut self, name: impl Into<String>, action: PointedAction) {
        self.actions.insert(name.into(), Arc::new(action));
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn props(&self) -> &[PropId] {
        &self.props
    }

    pub fn action(&self, name: &str) -> Option<&Arc<PointedAction>> {
        self.actions.get(name)
    }

    pub fn parse(&self, text: &str) -> Result<Formula, ParseError> {
        let mut p = Parser::new(self, text)?;
        let f = p.formula()?;
        p.finish()?;
        Ok(f)
    }

    /// Parses a standalone action expression such as `show-(a, r & ~l)`.
    pub fn parse_action(&self, text: &str) -> Result<Action, ParseError> {
        let mut p = Parser::new(self, text)?;
        let act = p.action()?;
        p.finish()?;
        Ok(act)
    }
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Lt,
    Gt,
    At,
    Plus,
    Minus,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::End => "end of input".into(),
        other => {
            let s = match other {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBrack => "[",
                Tok::RBrack => "]",
                Tok::Comma => ",",
                Tok::Tilde => "~",
                Tok::Amp => "&",
                Tok::Bar => "|",
                Tok::Arrow => "->",
                Tok::DArrow => "<->",
                Tok::Lt => "<",
                Tok::Gt => ">",
                Tok::At => "@",
                Tok::Plus => "+",
                _ => "-",
            };
            format!("`{s}`")
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'>' => Tok::Gt,
            b'@' => Tok::At,
            b'+' => Tok::Plus,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'-' => Tok::Minus,
            b'<' if text[i..].starts_with("<->") => {
                i += 2;
                Tok::DArrow
            }
            b'<' => Tok::Lt,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_owned())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'r> {
    reg: &'r Registry,
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl<'r> Parser<'r> {
    fn new(reg: &'r Registry, text: &str) -> Result<Self, ParseError> {
        Ok(Parser { reg, toks: lex(text)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", describe(&want), describe(self.peek())))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => self.error(format!("unexpected {} after formula", describe(t))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn agent(&mut self) -> Result<AgentId, ParseError> {
        let pos = self.pos();
        let name = self.ident()?;
        let agent = AgentId::new(&name);
        if is_identifier(&name) && self.reg.agents.contains(&agent) {
            Ok(agent)
        } else {
            Err(ParseError { pos, msg: format!("unknown agent `{name}`") })
        }
    }

    fn prop(&mut self) -> Result<PropId, ParseError> {
        let pos = self.pos();
        let name = self.ident()?;
        let prop = PropId::new(&name);
        if is_identifier(&name) && self.reg.props.contains(&prop) {
            Ok(prop)
        } else {
            Err(ParseError { pos, msg: format!("unknown proposition `{name}`") })
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            Ok(Literal { prop: self.prop()?, positive: false })
        } else {
            Ok(Literal { prop: self.prop()?, positive: true })
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let r = self.implication()?;
            f = Formula::iff(f, r);
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let l = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let r = self.implication()?;
            return Ok(Formula::implies(l, r));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let r = self.conjunction()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let r = self.unary()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let act = self.action()?;
                self.expect(Tok::RBrack)?;
                Ok(Formula::boxed(act, self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let act = self.action()?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(act, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => self.word(&name),
            t => self.error(format!("expected formula, found {}", describe(&t))),
        }
    }

    fn word(&mut self, name: &str) -> Result<Formula, ParseError> {
        let pos = self.pos();
        self.bump();
        match name {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::falsum()),
            "B" | "Bhat" => {
                self.expect(Tok::LBrack)?;
                let a = self.agent()?;
                self.expect(Tok::RBrack)?;
                let body = self.unary()?;
                Ok(if name == "B" { Formula::believes(a, body) } else { Formula::believable(a, body) })
            }
            "obs" => {
                self.expect(Tok::LParen)?;
                let a = self.agent()?;
                self.expect(Tok::Comma)?;
                let l = self.literal()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::obs(a, l))
            }
            "Sim" | "Dis" | "O" | "Os" | "Bs" | "Surprise" => self.mac(name, pos),
            "tell" | "show" => Err(ParseError { pos, msg: format!("`{name}` action outside a modality") }),
            _ => {
                self.at -= 1;
                Ok(Formula::Prop(self.prop()?))
            }
        }
    }

    /// Derived-notion macros, expanded on the spot.
    fn mac(&mut self, name: &str, pos: usize) -> Result<Formula, ParseError> {
        let reg = self.reg;
        let agents = &reg.agents;
        let wrap = |e: crate::Error| ParseError { pos, msg: e.to_string() };
        self.expect(Tok::LParen)?;
        let f = match name {
            "Sim" | "Dis" => {
                let a = self.agent()?;
                self.expect(Tok::Comma)?;
                let b = self.agent()?;
                self.expect(Tok::Comma)?;
                let p = self.prop()?;
                let f = if name == "Sim" {
                    derived::sim(agents, &a, &b, &p)
                } else {
                    derived::dis(agents, &a, &b, &p)
                };
                f.map_err(wrap)?
            }
            "O" | "Os" => {
                let a = self.agent()?;
                self.expect(Tok::Comma)?;
                let l = self.literal()?;
                if name == "O" {
                    derived::epistemic_obs(&a, &l)
                } else {
                    derived::strong_epistemic_obs(agents, &a, &l).map_err(wrap)?
                }
            }
            "Bs" => {
                let b = self.agent()?;
                self.expect(Tok::Comma)?;
                let phi = self.formula()?;
                derived::strong_belief(agents, &b, &phi).map_err(wrap)?
            }
            _ => {
                let kpos = self.pos();
                let kind = match self.ident()?.as_str() {
                    "mismatch" => SurpriseKind::Mismatch,
                    "strong_mismatch" => SurpriseKind::StrongMismatch,
                    "astonishment" => SurpriseKind::Astonishment,
                    other => {
                        return Err(ParseError { pos: kpos, msg: format!("unknown surprise kind `{other}`") })
                    }
                };
                self.expect(Tok::Comma)?;
                let a = self.agent()?;
                self.expect(Tok::Comma)?;
                let p = self.prop()?;
                derived::surprise(kind, &a, &p)
            }
        };
        self.expect(Tok::RParen)?;
        Ok(f)
    }

    fn action(&mut self) -> Result<Action, ParseError> {
        let pos = self.pos();
        if *self.peek() == Tok::At {
            self.bump();
            let name = self.ident()?;
            return match self.reg.actions.get(&name) {
                Some(pa) => Ok(Action::named(name, pa.clone())),
                None => Err(ParseError { pos, msg: format!("unknown action `@{name}`") }),
            };
        }
        let kind = self.ident()?;
        if kind != "tell" && kind != "show" {
            return Err(ParseError { pos, msg: format!("expected tell, show or @name, found `{kind}`") });
        }
        let positive = match self.bump() {
            Tok::Plus => true,
            Tok::Minus => false,
            t => {
                return Err(ParseError {
                    pos,
                    msg: format!("expected `+` or `-` after `{kind}`, found {}", describe(&t)),
                })
            }
        };
        self.expect(Tok::LParen)?;
        let actor = self.agent()?;
        self.expect(Tok::Comma)?;
        let ty = if kind == "tell" {
            let phi = self.formula()?;
            if positive {
                ActionType::TellPlus(actor, phi)
            } else {
                ActionType::TellMinus(actor, phi)
            }
        } else {
            let mut lits = vec![self.literal()?];
            while *self.peek() == Tok::Amp {
                self.bump();
                lits.push(self.literal()?);
            }
            let conj = LiteralConj::try_from(lits).map_err(|e| ParseError { pos, msg: e.to_string() })?;
            if positive {
                ActionType::ShowPlus(actor, conj)
            } else {
                ActionType::ShowMinus(actor, conj)
            }
        };
        self.expect(Tok::RParen)?;
        Action::from_type(ty, &self.reg.agents).map_err(|e| ParseError { pos, msg: e.to_string() })
    }
}
