//! Scenario file reader and writer.
//!
//! The format is a whitespace-insensitive token stream; `#` starts a comment.
//! See `docs/scenario-format.md` for the grammar.

use crate::error::{Error, Result};
use crate::game::{validate, AgentId, Game, GameSpec, Pattern, Slot};
use crate::rat::{self, Rat};
use crate::strategy::{CmpOp, Cond, Operand, PrivateRule, Ref, RoundRef, Rule, Strategy, StrategySet};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    Punct(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCT: [&str; 18] = ["->", "==", "!=", "<=", ">=", "(", ")", "{", "}", "[", "]", ",", ":", "=", "*", "<", ">", "%"];

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| Error::Parse { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(start_line, start_col, "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"') | Some('\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), line: start_line, column: start_col });
            continue;
        }
        let negative_number = c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit());
        if c.is_ascii_digit() || negative_number {
            let mut s = String::new();
            s.push(c);
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || (chars[i] == '/' && s.find('/').is_none())) {
                s.push(chars[i]);
                i += 1;
            }
            col += s.chars().count();
            if s.ends_with('/') {
                return Err(err(start_line, start_col, format!("malformed fraction {s:?}")));
            }
            out.push(Token { tok: Tok::Num(s), line: start_line, column: start_col });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
            }
            col += s.chars().count();
            out.push(Token { tok: Tok::Ident(s), line: start_line, column: start_col });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                i += p.len();
                col += p.len();
                out.push(Token { tok: Tok::Punct(p), line: start_line, column: start_col });
            }
            None => return Err(err(line, col, format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    spec: GameSpec,
    sets: Vec<StrategySet>,
    end: (usize, usize),
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.column))
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse { line, column, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_ident(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(q)) if q == w)
    }

    fn punct(&mut self, p: &str) -> Result<()> {
        if self.is_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {p:?}"))
        }
    }

    fn keyword(&mut self, w: &str) -> Result<()> {
        if self.is_ident(w) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {w:?}"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected a name"),
        }
    }

    fn string(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected a quoted label"),
        }
    }

    fn number(&mut self) -> Result<Rat> {
        match self.peek() {
            Some(Tok::Num(s)) => match rat::parse(s) {
                Some(r) => {
                    self.pos += 1;
                    if self.is_punct("%") {
                        self.pos += 1;
                        return Ok(r / rat::int(100));
                    }
                    Ok(r)
                }
                None => self.fail(format!("invalid number {s:?}")),
            },
            _ => self.fail("expected a number"),
        }
    }

    fn count(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Num(s)) => match s.parse::<usize>() {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => self.fail(format!("expected a non-negative integer, found {s:?}")),
            },
            _ => self.fail("expected an integer"),
        }
    }

    fn agent(&mut self) -> Result<AgentId> {
        let name = self.ident()?;
        match self.spec.agent_id(&name) {
            Some(a) => Ok(a),
            None => {
                self.pos -= 1;
                self.fail(format!("unknown agent {name:?}"))
            }
        }
    }

    fn round(&mut self, what: &str) -> Result<usize> {
        let r = self.count()?;
        if r > self.spec.rounds {
            self.pos -= 1;
            return self.fail(format!("{what} round {r} beyond the {} declared rounds", self.spec.rounds));
        }
        Ok(r)
    }

    fn decision_round(&mut self) -> Result<usize> {
        let r = self.round("decision")?;
        if r == 0 {
            self.pos -= 1;
            return self.fail("decisions start at round 1");
        }
        Ok(r)
    }

    fn file(mut self) -> Result<(GameSpec, Vec<StrategySet>)> {
        self.keyword("scenario")?;
        let name = self.string()?;
        self.keyword("rounds")?;
        let rounds = self.count()?;
        self.spec = GameSpec::new(&name, rounds);
        while let Some(tok) = self.next() {
            let Tok::Ident(word) = tok else {
                self.pos -= 1;
                return self.fail("expected a declaration");
            };
            match word.as_str() {
                "agent" => {
                    let name = self.ident()?;
                    if self.spec.agent_id(&name).is_some() {
                        self.pos -= 1;
                        return self.fail(format!("duplicate agent {name:?}"));
                    }
                    let public = self.is_ident("public");
                    if public {
                        self.pos += 1;
                    }
                    self.spec.add_agent(&name, public);
                }
                "reveal" => {
                    let from = self.agent()?;
                    self.punct("->")?;
                    let to = self.agent()?;
                    self.spec.reveal.push((from, to));
                }
                "type" => {
                    let a = self.agent()?;
                    let r = self.round("type")?;
                    let label = self.string()?;
                    let ann = if matches!(self.peek(), Some(Tok::Num(_))) { Some(self.number()?) } else { None };
                    self.spec.add_type(a, r, &label, ann);
                }
                "initial" => {
                    let a = self.agent()?;
                    let label = self.string()?;
                    self.spec.set_initial(a, &label);
                }
                "decision" => {
                    let r = self.decision_round()?;
                    let labels = self.labels()?;
                    self.spec.decisions[r - 1].public = labels;
                }
                "private" => {
                    let r = self.decision_round()?;
                    let a = self.agent()?;
                    let labels = self.labels()?;
                    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
                    self.spec.set_private_decisions(r, a, &refs);
                }
                "kernel" => {
                    let a = self.agent()?;
                    let r = self.decision_round()?;
                    let pattern = self.pattern(a)?;
                    self.punct("->")?;
                    self.punct("{")?;
                    let mut outcomes = Vec::new();
                    loop {
                        let label = self.string()?;
                        self.punct(":")?;
                        let w = self.number()?;
                        outcomes.push((label, w));
                        if self.is_punct(",") {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    self.punct("}")?;
                    let refs = outcomes.iter().map(|(l, w)| (l.as_str(), w.clone())).collect();
                    self.spec.add_kernel(a, r, pattern, refs);
                }
                "utility" => {
                    let r = self.decision_round()?;
                    let a = self.agent()?;
                    let pattern = self.pattern(a)?;
                    self.punct("=")?;
                    let v = self.number()?;
                    self.spec.add_utility(r, a, pattern, v);
                }
                "strategy" => {
                    let a = self.agent()?;
                    let s = self.strategy()?;
                    match self.sets.iter_mut().find(|set| set.agent == a) {
                        Some(set) => {
                            if set.get(&s.name).is_some() {
                                return self.fail(format!("duplicate strategy {:?}", s.name));
                            }
                            set.strategies.push(s);
                        }
                        None => self.sets.push(StrategySet { agent: a, strategies: vec![s] }),
                    }
                }
                other => {
                    self.pos -= 1;
                    return self.fail(format!("unknown declaration {other:?}"));
                }
            }
        }
        Ok((self.spec, self.sets))
    }

    fn labels(&mut self) -> Result<Vec<String>> {
        let mut v = vec![self.string()?];
        while matches!(self.peek(), Some(Tok::Str(_))) {
            v.push(self.string()?);
        }
        Ok(v)
    }

    fn slot(&mut self) -> Result<Slot> {
        if self.is_punct("*") {
            self.pos += 1;
            Ok(Slot::Any)
        } else {
            Ok(Slot::Is(self.string()?))
        }
    }

    fn pattern(&mut self, agent: AgentId) -> Result<Pattern> {
        self.punct("(")?;
        let own_type = self.slot()?;
        self.punct(",")?;
        let public_type = self.slot()?;
        self.punct(",")?;
        let public = self.slot()?;
        self.punct(",")?;
        let mut private = Vec::new();
        if self.is_punct("[") {
            self.pos += 1;
            while !self.is_punct("]") {
                let a = self.agent()?;
                self.punct("=")?;
                private.push((a, self.string()?));
                if self.is_punct(",") {
                    self.pos += 1;
                }
            }
            self.pos += 1;
        } else if let Slot::Is(l) = self.slot()? {
            private.push((agent, l));
        }
        self.punct(")")?;
        Ok(Pattern { own_type, public_type, public, private })
    }

    fn strategy(&mut self) -> Result<Strategy> {
        let name = self.string()?;
        let mut s = Strategy::new(&name, Rule::Truth);
        self.punct("{")?;
        while !self.is_punct("}") {
            if self.is_ident("default") {
                self.pos += 1;
                self.punct(":")?;
                s.default = self.rule()?;
            } else if self.is_ident("round") {
                self.pos += 1;
                let r = self.decision_round()?;
                self.punct(":")?;
                let rule = self.rule()?;
                s.rounds.insert(r, rule);
            } else if self.is_ident("private") {
                self.pos += 1;
                self.punct(":")?;
                s.private = self.prule()?;
            } else {
                return self.fail("expected `default:`, `round N:` or `private:`");
            }
        }
        self.pos += 1;
        Ok(s)
    }

    fn rule(&mut self) -> Result<Rule> {
        match self.peek().cloned() {
            Some(Tok::Str(l)) => {
                self.pos += 1;
                Ok(Rule::Label(l))
            }
            Some(Tok::Num(_)) => Ok(Rule::Ann(self.number()?)),
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let r = self.rule()?;
                self.punct(")")?;
                Ok(r)
            }
            Some(Tok::Ident(w)) => {
                self.pos += 1;
                match w.as_str() {
                    "truth" => Ok(Rule::Truth),
                    "flip" => Ok(Rule::Flip),
                    "if" => {
                        let c = self.cond()?;
                        self.keyword("then")?;
                        let a = self.rule()?;
                        self.keyword("else")?;
                        let b = self.rule()?;
                        Ok(Rule::If(c, Box::new(a), Box::new(b)))
                    }
                    "mix" => {
                        self.punct("{")?;
                        let mut parts = Vec::new();
                        loop {
                            let w = self.number()?;
                            self.punct(":")?;
                            parts.push((w, self.rule()?));
                            if self.is_punct(",") {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                        self.punct("}")?;
                        Ok(Rule::Mix(parts))
                    }
                    _ => {
                        self.pos -= 1;
                        self.fail(format!("unknown report rule {w:?}"))
                    }
                }
            }
            _ => self.fail("expected a report rule"),
        }
    }

    fn prule(&mut self) -> Result<PrivateRule> {
        let w = self.ident()?;
        match w.as_str() {
            "follow" => Ok(PrivateRule::Follow),
            "choose" => Ok(PrivateRule::Choose(self.string()?)),
            "if" => {
                let c = self.cond()?;
                self.keyword("then")?;
                let a = self.prule()?;
                self.keyword("else")?;
                let b = self.prule()?;
                Ok(PrivateRule::If(c, Box::new(a), Box::new(b)))
            }
            "mix" => {
                self.punct("{")?;
                let mut parts = Vec::new();
                loop {
                    let w = self.number()?;
                    self.punct(":")?;
                    parts.push((w, self.prule()?));
                    if self.is_punct(",") {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.punct("}")?;
                Ok(PrivateRule::Mix(parts))
            }
            _ => {
                self.pos -= 1;
                self.fail(format!("unknown private rule {w:?}"))
            }
        }
    }

    fn cond(&mut self) -> Result<Cond> {
        let mut c = self.conj()?;
        while self.is_ident("or") {
            self.pos += 1;
            c = Cond::Or(Box::new(c), Box::new(self.conj()?));
        }
        Ok(c)
    }

    fn conj(&mut self) -> Result<Cond> {
        let mut c = self.unary()?;
        while self.is_ident("and") {
            self.pos += 1;
            c = Cond::And(Box::new(c), Box::new(self.unary()?));
        }
        Ok(c)
    }

    fn unary(&mut self) -> Result<Cond> {
        if self.is_ident("not") {
            self.pos += 1;
            return Ok(Cond::Not(Box::new(self.unary()?)));
        }
        if self.is_ident("true") {
            self.pos += 1;
            return Ok(Cond::True);
        }
        if self.is_punct("(") {
            self.pos += 1;
            let c = self.cond()?;
            self.punct(")")?;
            return Ok(c);
        }
        let a = self.operand()?;
        let op = match self.next() {
            Some(Tok::Punct("==")) => CmpOp::Eq,
            Some(Tok::Punct("!=")) => CmpOp::Ne,
            Some(Tok::Punct("<")) => CmpOp::Lt,
            Some(Tok::Punct("<=")) => CmpOp::Le,
            Some(Tok::Punct(">")) => CmpOp::Gt,
            Some(Tok::Punct(">=")) => CmpOp::Ge,
            _ => {
                self.pos -= 1;
                return self.fail("expected a comparison operator");
            }
        };
        let b = self.operand()?;
        Ok(Cond::Cmp(a, op, b))
    }

    fn operand(&mut self) -> Result<Operand> {
        match self.peek().cloned() {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Operand::Str(s))
            }
            Some(Tok::Num(_)) => Ok(Operand::Const(self.number()?)),
            Some(Tok::Ident(w)) if w == "round" => {
                self.pos += 1;
                Ok(Operand::Round)
            }
            Some(Tok::Ident(w)) if w == "ann" || w == "label" => {
                self.pos += 1;
                self.punct("(")?;
                let r = self.reference()?;
                self.punct(")")?;
                Ok(if w == "ann" { Operand::Ann(r) } else { Operand::Label(r) })
            }
            _ => self.fail("expected an operand"),
        }
    }

    fn reference(&mut self) -> Result<Ref> {
        let w = self.ident()?;
        self.punct("(")?;
        let r = match w.as_str() {
            "report" => {
                let agent = self.agent()?;
                self.punct(",")?;
                Ref::Report { agent, round: self.round_ref()? }
            }
            "revealed" => {
                let agent = self.agent()?;
                self.punct(",")?;
                Ref::Revealed { agent, round: self.round_ref()? }
            }
            "own" => Ref::OwnType { round: self.round_ref()? },
            "decision" => Ref::Decision { round: self.round_ref()? },
            _ => {
                self.pos -= 2;
                return self.fail(format!("unknown reference {w:?}"));
            }
        };
        self.punct(")")?;
        Ok(r)
    }

    fn round_ref(&mut self) -> Result<RoundRef> {
        if self.is_ident("t") {
            self.pos += 1;
            if let Some(Tok::Num(s)) = self.peek() {
                if let Some(k) = s.strip_prefix('-').and_then(|k| k.parse::<usize>().ok()) {
                    self.pos += 1;
                    return Ok(RoundRef::Prev(k));
                }
            }
            return Ok(RoundRef::Cur);
        }
        Ok(RoundRef::Abs(self.count()?))
    }
}

/// Parses a scenario file into a spec and the strategy sets it declares.
pub fn parse_scenario(src: &str) -> Result<(GameSpec, Vec<StrategySet>)> {
    let toks = tokenize(src)?;
    let lines = src.lines().count().max(1);
    let last = src.lines().last().map_or(0, |l| l.chars().count());
    let p = Parser { toks, pos: 0, spec: GameSpec::default(), sets: Vec::new(), end: (lines, last + 1) };
    p.file()
}

/// Parses, validates and checks every declared strategy.
pub fn load_scenario(src: &str) -> Result<(Game, Vec<StrategySet>)> {
    let (spec, sets) = parse_scenario(src)?;
    let game = validate(spec)?;
    for set in &sets {
        for s in &set.strategies {
            s.check(&game, set.agent)?;
        }
    }
    Ok((game, sets))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn slot_text(s: &Slot) -> String {
    match s {
        Slot::Any => "*".into(),
        Slot::Is(l) => quote(l),
    }
}

/// `(type, pubtype, x0, xi)` text of a pattern for `agent`.
pub fn pattern_text(spec: &GameSpec, agent: AgentId, p: &Pattern) -> String {
    let xi = match p.private.as_slice() {
        [] => "*".to_string(),
        [(a, l)] if *a == agent => quote(l),
        list => {
            let parts: Vec<String> = list.iter().map(|(a, l)| format!("{}={}", spec.agents[*a].name, quote(l))).collect();
            format!("[{}]", parts.join(", "))
        }
    };
    format!("({}, {}, {}, {})", slot_text(&p.own_type), slot_text(&p.public_type), slot_text(&p.public), xi)
}

fn round_ref_text(r: &RoundRef) -> String {
    match r {
        RoundRef::Abs(k) => k.to_string(),
        RoundRef::Cur => "t".into(),
        RoundRef::Prev(k) => format!("t-{k}"),
    }
}

fn ref_text(spec: &GameSpec, r: &Ref) -> String {
    match r {
        Ref::Report { agent, round } => format!("report({}, {})", spec.agents[*agent].name, round_ref_text(round)),
        Ref::Revealed { agent, round } => format!("revealed({}, {})", spec.agents[*agent].name, round_ref_text(round)),
        Ref::OwnType { round } => format!("own({})", round_ref_text(round)),
        Ref::Decision { round } => format!("decision({})", round_ref_text(round)),
    }
}

fn operand_text(spec: &GameSpec, o: &Operand) -> String {
    match o {
        Operand::Ann(r) => format!("ann({})", ref_text(spec, r)),
        Operand::Label(r) => format!("label({})", ref_text(spec, r)),
        Operand::Const(c) => rat::fmt(c),
        Operand::Str(s) => quote(s),
        Operand::Round => "round".into(),
    }
}

pub fn cond_text(spec: &GameSpec, c: &Cond) -> String {
    match c {
        Cond::True => "true".into(),
        Cond::Not(a) => format!("not {}", cond_atom(spec, a)),
        Cond::And(a, b) => format!("{} and {}", cond_atom(spec, a), cond_atom(spec, b)),
        Cond::Or(a, b) => format!("{} or {}", cond_atom(spec, a), cond_atom(spec, b)),
        Cond::Cmp(a, op, b) => format!("{} {} {}", operand_text(spec, a), op.symbol(), operand_text(spec, b)),
    }
}

fn cond_atom(spec: &GameSpec, c: &Cond) -> String {
    match c {
        Cond::And(..) | Cond::Or(..) => format!("({})", cond_text(spec, c)),
        _ => cond_text(spec, c),
    }
}

pub fn rule_text(spec: &GameSpec, r: &Rule) -> String {
    match r {
        Rule::Truth => "truth".into(),
        Rule::Flip => "flip".into(),
        Rule::Label(l) => quote(l),
        Rule::Ann(p) => rat::fmt(p),
        Rule::If(c, a, b) => {
            format!("if {} then {} else {}", cond_text(spec, c), rule_atom(spec, a), rule_atom(spec, b))
        }
        Rule::Mix(parts) => {
            let ps: Vec<String> = parts.iter().map(|(w, r)| format!("{}: {}", rat::fmt(w), rule_text(spec, r))).collect();
            format!("mix {{{}}}", ps.join(", "))
        }
    }
}

fn rule_atom(spec: &GameSpec, r: &Rule) -> String {
    match r {
        Rule::If(..) => format!("({})", rule_text(spec, r)),
        _ => rule_text(spec, r),
    }
}

pub fn private_text(spec: &GameSpec, r: &PrivateRule) -> String {
    match r {
        PrivateRule::Follow => "follow".into(),
        PrivateRule::Choose(l) => format!("choose {}", quote(l)),
        PrivateRule::If(c, a, b) => {
            format!("if {} then {} else {}", cond_text(spec, c), private_text(spec, a), private_text(spec, b))
        }
        PrivateRule::Mix(parts) => {
            let ps: Vec<String> = parts.iter().map(|(w, r)| format!("{}: {}", rat::fmt(w), private_text(spec, r))).collect();
            format!("mix {{{}}}", ps.join(", "))
        }
    }
}

pub fn strategy_text(spec: &GameSpec, agent: AgentId, s: &Strategy) -> String {
    let mut out = format!("strategy {} {} {{\n", spec.agents[agent].name, quote(&s.name));
    out.push_str(&format!("  default: {}\n", rule_text(spec, &s.default)));
    for (r, rule) in &s.rounds {
        out.push_str(&format!("  round {r}: {}\n", rule_text(spec, rule)));
    }
    if s.private != PrivateRule::Follow {
        out.push_str(&format!("  private: {}\n", private_text(spec, &s.private)));
    }
    out.push_str("}\n");
    out
}

/// Writes `spec` (and optional strategy sets) in the scenario format.
pub fn export_scenario(spec: &GameSpec, sets: &[StrategySet]) -> String {
    let mut o = format!("scenario {}\nrounds {}\n\n", quote(&spec.name), spec.rounds);
    for a in &spec.agents {
        o.push_str(&format!("agent {}{}\n", a.name, if a.public { " public" } else { "" }));
    }
    for (from, to) in &spec.reveal {
        o.push_str(&format!("reveal {} -> {}\n", spec.agents[*from].name, spec.agents[*to].name));
    }
    o.push('\n');
    for t in &spec.types {
        let ann = t.annotation.as_ref().map(|p| format!(" {}", rat::fmt(p))).unwrap_or_default();
        o.push_str(&format!("type {} {} {}{}\n", spec.agents[t.agent].name, t.round, quote(&t.label), ann));
    }
    for (a, l) in spec.initial.iter().enumerate() {
        o.push_str(&format!("initial {} {}\n", spec.agents[a].name, quote(l)));
    }
    o.push('\n');
    for (k, rd) in spec.decisions.iter().enumerate() {
        if !rd.public.is_empty() {
            let labels: Vec<String> = rd.public.iter().map(|l| quote(l)).collect();
            o.push_str(&format!("decision {} {}\n", k + 1, labels.join(" ")));
        }
        for (a, ls) in rd.private.iter().enumerate() {
            if !ls.is_empty() {
                let labels: Vec<String> = ls.iter().map(|l| quote(l)).collect();
                o.push_str(&format!("private {} {} {}\n", k + 1, spec.agents[a].name, labels.join(" ")));
            }
        }
    }
    o.push('\n');
    for row in &spec.kernel {
        let outs: Vec<String> = row.outcomes.iter().map(|(l, w)| format!("{}: {}", quote(l), rat::fmt(w))).collect();
        o.push_str(&format!(
            "kernel {} {} {} -> {{{}}}\n",
            spec.agents[row.agent].name,
            row.round,
            pattern_text(spec, row.agent, &row.pattern),
            outs.join(", ")
        ));
    }
    o.push('\n');
    for u in &spec.utilities {
        o.push_str(&format!(
            "utility {} {} {} = {}\n",
            u.round,
            spec.agents[u.agent].name,
            pattern_text(spec, u.agent, &u.pattern),
            rat::fmt(&u.value)
        ));
    }
    for set in sets {
        o.push('\n');
        for s in &set.strategies {
            o.push_str(&strategy_text(spec, set.agent, s));
        }
    }
    o
}
