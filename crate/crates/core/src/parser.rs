//! Concrete syntax for signatures, types and processes.
//!
//! Parsing happens in two passes. The first builds a surface tree in which
//! `x <- f a b` is still ambiguous between a forward and a call; the second
//! resolves process names and desugars parameterized definitions and calls
//! into the core [`Process`] forms. See `docs/grammar.md` for the grammar.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{
    Branches, Channel, Ident, Label, ProcDef, ProcName, Process, SessionType, Signature,
    SignatureError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    Duplicate,
    Arity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Type,
    Proc,
    Close,
    Wait,
    Send,
    Recv,
    Case,
    Of,
    One,
    Star,
    Lolli,
    Plus,
    Amp,
    Meet,
    Join,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LArrow,
    FatArrow,
    Eq,
    Colon,
    Semi,
    Dot,
    Comma,
    Bar,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Type => "`type`",
            Tok::Proc => "`proc`",
            Tok::Close => "`close`",
            Tok::Wait => "`wait`",
            Tok::Send => "`send`",
            Tok::Recv => "`recv`",
            Tok::Case => "`case`",
            Tok::Of => "`of`",
            Tok::One => "`1`",
            Tok::Star => "`*`",
            Tok::Lolli => "`-o`",
            Tok::Plus => "`+`",
            Tok::Amp => "`&`",
            Tok::Meet => "`/\\`",
            Tok::Join => "`\\/`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LArrow => "`<-`",
            Tok::FatArrow => "`=>`",
            Tok::Eq => "`=`",
            Tok::Colon => "`:`",
            Tok::Semi => "`;`",
            Tok::Dot => "`.`",
            Tok::Comma => "`,`",
            Tok::Bar => "`|`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "type" => Tok::Type,
        "proc" => Tok::Proc,
        "close" => Tok::Close,
        "wait" => Tok::Wait,
        "send" => Tok::Send,
        "recv" => Tok::Recv,
        "case" => Tok::Case,
        "of" => Tok::Of,
        _ => return None,
    })
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError {
        kind: ParseErrorKind::Lexical,
        line,
        col,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let next = chars.get(i + 1).copied();
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                adv = j - i;
                keyword(&word).unwrap_or(Tok::Ident(word))
            }
            '1' if !next.is_some_and(|n| n.is_ascii_alphanumeric()) => Tok::One,
            '*' => Tok::Star,
            '-' if next == Some('o') => {
                adv = 2;
                Tok::Lolli
            }
            '+' => Tok::Plus,
            '&' => Tok::Amp,
            '/' if next == Some('\\') => {
                adv = 2;
                Tok::Meet
            }
            '\\' if next == Some('/') => {
                adv = 2;
                Tok::Join
            }
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '<' if next == Some('-') => {
                adv = 2;
                Tok::LArrow
            }
            '=' if next == Some('>') => {
                adv = 2;
                Tok::FatArrow
            }
            '=' => Tok::Eq,
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            '|' => Tok::Bar,
            other => return Err(err(line, col, format!("unexpected character {other:?}"))),
        };
        toks.push((tok, pos));
        i += adv;
        col += adv;
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(toks)
}

/// Surface process tree, before name resolution.
#[derive(Debug, Clone)]
enum SProc {
    /// `target <- head args [; cont]`: a call if `head` names a process,
    /// otherwise a forward.
    Arrow {
        target: String,
        head: String,
        args: Vec<String>,
        cont: Option<Box<SProc>>,
        pos: Pos,
    },
    Bare(String, Pos),
    Cut {
        bound: String,
        annot: Option<SessionType>,
        child: Box<SProc>,
        cont: Box<SProc>,
    },
    Close(String),
    Wait(String, Box<SProc>),
    Send {
        ch: String,
        bound: String,
        payload: Box<SProc>,
        cont: Box<SProc>,
    },
    Recv {
        bound: String,
        ch: String,
        cont: Box<SProc>,
    },
    Select {
        ch: String,
        label: String,
        cont: Box<SProc>,
    },
    Case {
        ch: String,
        branches: Vec<(String, SProc)>,
        pos: Pos,
    },
}

#[derive(Debug, Clone)]
struct SProcDecl {
    name: String,
    declared: SessionType,
    offer: String,
    params: Vec<String>,
    body: SProc,
    span: Span,
    name_pos: Pos,
}

#[derive(Debug, Clone)]
enum SDecl {
    Type {
        name: String,
        body: SessionType,
        span: Span,
        name_pos: Pos,
    },
    Proc(SProcDecl),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> Pos {
        self.toks[self.pos].1
    }

    fn last_end(&self) -> Pos {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        let p = self.here();
        ParseError {
            kind: ParseErrorKind::Syntax,
            line: p.line,
            col: p.col,
            message,
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {other}"))),
        }
    }

    // Types, loosest to tightest: \/, /\, -o (right), * (right), atoms.

    fn ty(&mut self) -> Result<SessionType, ParseError> {
        let mut t = self.meet()?;
        while *self.peek() == Tok::Join {
            self.bump();
            t = SessionType::join(t, self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<SessionType, ParseError> {
        let mut t = self.lolli()?;
        while *self.peek() == Tok::Meet {
            self.bump();
            t = SessionType::meet(t, self.lolli()?);
        }
        Ok(t)
    }

    fn lolli(&mut self) -> Result<SessionType, ParseError> {
        let t = self.tensor()?;
        if *self.peek() == Tok::Lolli {
            self.bump();
            return Ok(SessionType::lolli(t, self.lolli()?));
        }
        Ok(t)
    }

    fn tensor(&mut self) -> Result<SessionType, ParseError> {
        let t = self.atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            return Ok(SessionType::tensor(t, self.tensor()?));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<SessionType, ParseError> {
        match self.peek().clone() {
            Tok::One => {
                self.bump();
                Ok(SessionType::End)
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(SessionType::Name(Ident::from(s)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Plus | Tok::Amp => {
                let internal = *self.peek() == Tok::Plus;
                self.bump();
                let open = self.here();
                self.expect(Tok::LBrace)?;
                let mut entries = Vec::new();
                loop {
                    let l = self.ident("label")?;
                    self.expect(Tok::Colon)?;
                    entries.push((Ident::from(l), self.ty()?));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                let bs = Branches::new(entries).map_err(|e| ParseError {
                    kind: ParseErrorKind::Syntax,
                    line: open.line,
                    col: open.col,
                    message: e.to_string(),
                })?;
                Ok(if internal {
                    SessionType::Internal(bs)
                } else {
                    SessionType::External(bs)
                })
            }
            other => Err(self.error(format!("expected a type, found {other}"))),
        }
    }

    fn proc(&mut self) -> Result<SProc, ParseError> {
        let start = self.here();
        match self.peek().clone() {
            Tok::Close => {
                self.bump();
                Ok(SProc::Close(self.ident("channel")?))
            }
            Tok::Wait => {
                self.bump();
                let c = self.ident("channel")?;
                self.expect(Tok::Semi)?;
                Ok(SProc::Wait(c, Box::new(self.proc()?)))
            }
            Tok::Send => {
                self.bump();
                let ch = self.ident("channel")?;
                self.expect(Tok::LParen)?;
                let bound = self.ident("channel")?;
                self.expect(Tok::LArrow)?;
                let payload = self.proc()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                Ok(SProc::Send {
                    ch,
                    bound,
                    payload: Box::new(payload),
                    cont: Box::new(self.proc()?),
                })
            }
            Tok::Case => {
                self.bump();
                let ch = self.ident("channel")?;
                self.expect(Tok::Of)?;
                self.expect(Tok::LBrace)?;
                let mut branches = Vec::new();
                loop {
                    let l = self.ident("label")?;
                    self.expect(Tok::FatArrow)?;
                    branches.push((l, self.proc()?));
                    if *self.peek() == Tok::Bar {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(SProc::Case {
                    ch,
                    branches,
                    pos: start,
                })
            }
            Tok::LParen => {
                self.bump();
                let p = self.proc()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(x) => {
                self.bump();
                match self.peek().clone() {
                    Tok::Dot => {
                        self.bump();
                        let label = self.ident("label")?;
                        self.expect(Tok::Semi)?;
                        Ok(SProc::Select {
                            ch: x,
                            label,
                            cont: Box::new(self.proc()?),
                        })
                    }
                    Tok::Colon => {
                        self.bump();
                        let annot = self.ty()?;
                        self.expect(Tok::LArrow)?;
                        let child = self.cut_child()?;
                        self.expect(Tok::Semi)?;
                        Ok(SProc::Cut {
                            bound: x,
                            annot: Some(annot),
                            child: Box::new(child),
                            cont: Box::new(self.proc()?),
                        })
                    }
                    Tok::LArrow => {
                        self.bump();
                        match self.peek().clone() {
                            Tok::Recv => {
                                self.bump();
                                let ch = self.ident("channel")?;
                                self.expect(Tok::Semi)?;
                                Ok(SProc::Recv {
                                    bound: x,
                                    ch,
                                    cont: Box::new(self.proc()?),
                                })
                            }
                            Tok::LParen => {
                                let child = self.cut_child()?;
                                self.expect(Tok::Semi)?;
                                Ok(SProc::Cut {
                                    bound: x,
                                    annot: None,
                                    child: Box::new(child),
                                    cont: Box::new(self.proc()?),
                                })
                            }
                            Tok::Ident(_) => {
                                let pos = self.here();
                                let head = self.ident("process or channel")?;
                                let mut args = Vec::new();
                                while let Tok::Ident(a) = self.peek().clone() {
                                    self.bump();
                                    args.push(a);
                                }
                                let cont = if *self.peek() == Tok::Semi {
                                    self.bump();
                                    Some(Box::new(self.proc()?))
                                } else {
                                    None
                                };
                                Ok(SProc::Arrow {
                                    target: x,
                                    head,
                                    args,
                                    cont,
                                    pos,
                                })
                            }
                            other => {
                                Err(self
                                    .error(format!("expected a process after `<-`, found {other}")))
                            }
                        }
                    }
                    _ => Ok(SProc::Bare(x, start)),
                }
            }
            other => Err(self.error(format!("expected a process, found {other}"))),
        }
    }

    fn cut_child(&mut self) -> Result<SProc, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let p = self.proc()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(x) => {
                let pos = self.here();
                self.bump();
                Ok(SProc::Bare(x, pos))
            }
            other => Err(self.error(format!("expected `(` or a process name, found {other}"))),
        }
    }

    fn decls(&mut self) -> Result<Vec<SDecl>, ParseError> {
        let mut out = Vec::new();
        loop {
            let start = self.here();
            match self.peek() {
                Tok::Eof => return Ok(out),
                Tok::Type => {
                    self.bump();
                    let name_pos = self.here();
                    let name = self.ident("type name")?;
                    self.expect(Tok::Eq)?;
                    let body = self.ty()?;
                    out.push(SDecl::Type {
                        name,
                        body,
                        span: Span {
                            start,
                            end: self.last_end(),
                        },
                        name_pos,
                    });
                }
                Tok::Proc => {
                    self.bump();
                    let name_pos = self.here();
                    let name = self.ident("process name")?;
                    self.expect(Tok::Colon)?;
                    let declared = self.ty()?;
                    let offer = self.ident("offered channel")?;
                    self.expect(Tok::LArrow)?;
                    let header_pos = self.here();
                    let again = self.ident("process name")?;
                    if again != name {
                        return Err(ParseError {
                            kind: ParseErrorKind::Syntax,
                            line: header_pos.line,
                            col: header_pos.col,
                            message: format!(
                                "definition header names `{again}`, expected `{name}`"
                            ),
                        });
                    }
                    let mut params = Vec::new();
                    while let Tok::Ident(p) = self.peek().clone() {
                        if p == offer || params.contains(&p) {
                            return Err(self.error(format!("channel `{p}` bound twice in header")));
                        }
                        self.bump();
                        params.push(p);
                    }
                    self.expect(Tok::Eq)?;
                    let body = self.proc()?;
                    out.push(SDecl::Proc(SProcDecl {
                        name,
                        declared,
                        offer,
                        params,
                        body,
                        span: Span {
                            start,
                            end: self.last_end(),
                        },
                        name_pos,
                    }));
                }
                other => {
                    return Err(self.error(format!("expected `type` or `proc`, found {other}")))
                }
            }
        }
    }
}

/// A parsed file: declarations in source order with their spans.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub signature: Signature,
    spans: HashMap<(bool, Ident), Span>,
}

impl SourceFile {
    pub fn type_span(&self, name: &Ident) -> Option<Span> {
        self.spans.get(&(false, name.clone())).copied()
    }

    pub fn proc_span(&self, name: &Ident) -> Option<Span> {
        self.spans.get(&(true, name.clone())).copied()
    }
}

/// Number of leading receives on the offered channel; the most arguments a
/// call may pass.
fn arity_of(offer: &Channel, body: &Process) -> usize {
    match body {
        Process::Recv { ch, cont, bound } if ch == offer && bound != offer => {
            1 + arity_of(offer, cont)
        }
        _ => 0,
    }
}

fn surface_arity(d: &SProcDecl) -> usize {
    let mut n = d.params.len();
    let mut p = &d.body;
    while let SProc::Recv { bound, ch, cont } = p {
        if *ch != d.offer || *bound == d.offer {
            break;
        }
        n += 1;
        p = cont;
    }
    n
}

fn fresh_name(base: &str, avoid: &HashSet<Channel>) -> Channel {
    let c = Channel::new(base);
    if !avoid.contains(&c) {
        return c;
    }
    (1..)
        .map(|i| Channel::new(&format!("{base}{i}")))
        .find(|c| !avoid.contains(c))
        .expect("unbounded supply of names")
}

/// Desugars `target <- callee args [; cont]`.
///
/// A tail call (no continuation) spawns the callee on a fresh channel, sends
/// each argument through a forwarding payload and finally forwards the new
/// channel to `target`. With a continuation, `target` is bound by the spawn
/// and scopes over the continuation.
pub fn desugar_call(
    callee: &ProcName,
    arity: usize,
    args: &[Channel],
    target: &Channel,
    cont: Option<Process>,
) -> Result<Process, DesugarError> {
    if args.len() > arity {
        return Err(DesugarError::Arity {
            callee: callee.clone(),
            expected: arity,
            found: args.len(),
        });
    }
    let mut avoid: HashSet<Channel> = args.iter().cloned().collect();
    avoid.insert(target.clone());
    if let Some(q) = &cont {
        q.all_channels(&mut avoid);
    }
    let (bound, tail) = match cont {
        None => {
            let e = fresh_name("e", &avoid);
            (e.clone(), Process::fwd(target.clone(), e))
        }
        Some(q) if args.contains(target) => {
            let e = fresh_name("e", &avoid);
            (e.clone(), crate::ast::subst_channel(&q, &e, target))
        }
        Some(q) => (target.clone(), q),
    };
    let mut body = tail;
    for a in args.iter().rev() {
        let x = fresh_name("x", &HashSet::from([a.clone()]));
        body = Process::send(bound.clone(), x.clone(), Process::fwd(x, a.clone()), body);
    }
    Ok(Process::spawn(
        bound,
        None,
        Process::Call(callee.clone()),
        body,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesugarError {
    #[error("`{callee}` takes at most {expected} argument(s), {found} given")]
    Arity {
        callee: ProcName,
        expected: usize,
        found: usize,
    },
}

struct Resolver<'a> {
    arities: &'a HashMap<String, usize>,
}

impl Resolver<'_> {
    fn syntax(pos: Pos, kind: ParseErrorKind, message: String) -> ParseError {
        ParseError {
            kind,
            line: pos.line,
            col: pos.col,
            message,
        }
    }

    fn resolve(&self, p: &SProc) -> Result<Process, ParseError> {
        let ch = |s: &str| Channel::new(s);
        Ok(match p {
            SProc::Arrow {
                target,
                head,
                args,
                cont,
                pos,
            } => {
                if let Some(&arity) = self.arities.get(head) {
                    let cont = cont.as_ref().map(|q| self.resolve(q)).transpose()?;
                    let args: Vec<Channel> = args.iter().map(|a| ch(a)).collect();
                    desugar_call(&Ident::new(head), arity, &args, &ch(target), cont)
                        .map_err(|e| Self::syntax(*pos, ParseErrorKind::Arity, e.to_string()))?
                } else if !args.is_empty() {
                    return Err(Self::syntax(
                        *pos,
                        ParseErrorKind::Syntax,
                        format!("unknown process `{head}`"),
                    ));
                } else if cont.is_some() {
                    return Err(Self::syntax(
                        *pos,
                        ParseErrorKind::Syntax,
                        format!("forward `{target} <- {head}` cannot have a continuation"),
                    ));
                } else {
                    Process::fwd(ch(target), ch(head))
                }
            }
            SProc::Bare(x, pos) => {
                if self.arities.contains_key(x) {
                    Process::call(x)
                } else {
                    return Err(Self::syntax(
                        *pos,
                        ParseErrorKind::Syntax,
                        format!("unknown process `{x}`"),
                    ));
                }
            }
            SProc::Cut {
                bound,
                annot,
                child,
                cont,
            } => Process::spawn(
                ch(bound),
                annot.clone(),
                self.resolve(child)?,
                self.resolve(cont)?,
            ),
            SProc::Close(c) => Process::close(ch(c)),
            SProc::Wait(c, q) => Process::wait(ch(c), self.resolve(q)?),
            SProc::Send {
                ch: c,
                bound,
                payload,
                cont,
            } => Process::send(
                ch(c),
                ch(bound),
                self.resolve(payload)?,
                self.resolve(cont)?,
            ),
            SProc::Recv { bound, ch: c, cont } => {
                Process::recv(ch(bound), ch(c), self.resolve(cont)?)
            }
            SProc::Select { ch: c, label, cont } => {
                Process::select(ch(c), label, self.resolve(cont)?)
            }
            SProc::Case {
                ch: c,
                branches,
                pos,
            } => {
                let mut entries: Vec<(Label, Process)> = Vec::new();
                for (l, q) in branches {
                    entries.push((Ident::new(l), self.resolve(q)?));
                }
                let branches = Branches::new(entries)
                    .map_err(|e| Self::syntax(*pos, ParseErrorKind::Syntax, e.to_string()))?;
                Process::Case {
                    ch: ch(c),
                    branches,
                }
            }
        })
    }
}

/// Parses a file and keeps per-declaration spans for diagnostics.
pub fn parse_source(text: &str) -> Result<SourceFile, ParseError> {
    let decls = Parser::new(text)?.decls()?;
    let mut arities = HashMap::new();
    for d in &decls {
        if let SDecl::Proc(p) = d {
            arities
                .entry(p.name.clone())
                .or_insert_with(|| surface_arity(p));
        }
    }
    let resolver = Resolver { arities: &arities };
    let mut sig = Signature::new();
    let mut spans = HashMap::new();
    let dup = |pos: Pos, e: SignatureError| ParseError {
        kind: ParseErrorKind::Duplicate,
        line: pos.line,
        col: pos.col,
        message: e.to_string(),
    };
    for d in decls {
        match d {
            SDecl::Type {
                name,
                body,
                span,
                name_pos,
            } => {
                let name = Ident::from(name);
                sig.add_type(name.clone(), body)
                    .map_err(|e| dup(name_pos, e))?;
                spans.insert((false, name), span);
            }
            SDecl::Proc(p) => {
                let offer = Channel::new(&p.offer);
                let mut body = resolver.resolve(&p.body)?;
                for param in p.params.iter().rev() {
                    body = Process::recv(Channel::new(param), offer.clone(), body);
                }
                let name = Ident::from(p.name.as_str());
                sig.add_proc(ProcDef {
                    name: name.clone(),
                    offer,
                    declared: p.declared,
                    body,
                })
                .map_err(|e| dup(p.name_pos, e))?;
                spans.insert((true, name), p.span);
            }
        }
    }
    Ok(SourceFile {
        signature: sig,
        spans,
    })
}

pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    parse_source(text).map(|f| f.signature)
}

pub fn parse_type(text: &str) -> Result<SessionType, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

/// Parses a process expression, resolving calls against `sig`.
pub fn parse_process(text: &str, sig: &Signature) -> Result<Process, ParseError> {
    let mut p = Parser::new(text)?;
    let sp = p.proc()?;
    p.expect(Tok::Eof)?;
    let arities: HashMap<String, usize> = sig
        .procdefs()
        .map(|d| (d.name.to_string(), arity_of(&d.offer, &d.body)))
        .collect();
    Resolver { arities: &arities }.resolve(&sp)
}
