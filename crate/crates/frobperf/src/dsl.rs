//! Script syntax.
//!
//! ```text
//! base R = GF(3)[u, v] / (u*v)
//! algebra A over R = [x, y, t] / (x*y - u, t*(x - y) - 1)
//! algebra E over GF(5) = [x, y] / (x*y, x + y - 1)
//! morphism f : C -> A = {a -> v*(x + y)*t}
//! subalgebra S of A = <x^3, y^3>
//! pregroupoid P = "tree.json"
//! preperfect A steps 3 probe (x, x + y) cert ((x + y)*t, v)
//! ```
//!
//! Statements end at a newline or `;`; `#` starts a comment. Polynomial
//! text is kept verbatim with its position and parsed once the ring is
//! known.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub pos: Pos,
}

impl Spanned<String> {
    /// Position of byte `offset` inside the text.
    pub fn pos_at(&self, offset: usize) -> Pos {
        let mut pos = self.pos;
        for ch in self.value[..offset.min(self.value.len())].chars() {
            if ch == '\n' {
                pos.line += 1;
                pos.col = 1;
            } else {
                pos.col += 1;
            }
        }
        pos
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: found {}, expected {}", self.pos, self.found, self.expected.join("|"))
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseRef {
    Field(u32),
    Named(Spanned<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Base {
        name: Spanned<String>,
        p: Spanned<u32>,
        vars: Vec<Spanned<String>>,
        relations: Vec<Spanned<String>>,
    },
    Algebra {
        name: Spanned<String>,
        over: BaseRef,
        gens: Vec<Spanned<String>>,
        relations: Vec<Spanned<String>>,
        allow_zero: bool,
    },
    Morphism {
        name: Spanned<String>,
        source: Spanned<String>,
        target: Spanned<String>,
        images: Vec<(Spanned<String>, Spanned<String>)>,
    },
    Subalgebra {
        name: Spanned<String>,
        ambient: Spanned<String>,
        gens: Vec<Spanned<String>>,
    },
    Pregroupoid {
        name: Spanned<String>,
        path: Spanned<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Word(Spanned<String>),
    Number(Spanned<u64>),
    Text(Spanned<String>),
    List(Vec<Spanned<String>>, Pos),
}

impl Arg {
    pub fn pos(&self) -> Pos {
        match self {
            Arg::Word(s) | Arg::Text(s) => s.pos,
            Arg::Number(n) => n.pos,
            Arg::List(_, p) => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub name: Spanned<String>,
    pub args: Vec<Arg>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Decl(Decl),
    Command(Command),
}

pub const DECLARATIONS: [&str; 5] = ["base", "algebra", "morphism", "subalgebra", "pregroupoid"];

pub const COMMANDS: [&str; 15] = [
    "frobtwist",
    "frobmap",
    "kernel",
    "image",
    "sup",
    "chain",
    "preperfect",
    "certify",
    "unramified",
    "relperfect",
    "pi0",
    "pi0-ring",
    "gpd-close",
    "gpd-verify",
    "crosscheck",
];

struct Lexer<'a> {
    src: &'a str,
    at: usize,
    line: usize,
    col: usize,
}

type PResult<T> = Result<T, SyntaxError>;

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '/')
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.at..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.src[self.at..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skips blanks and comments, but not newlines.
    fn skip_inline(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() && c != '\n' {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn skip_all(&mut self) {
        loop {
            self.skip_inline();
            if matches!(self.peek(), Some('\n' | ';')) {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn at_statement_end(&mut self) -> bool {
        self.skip_inline();
        matches!(self.peek(), None | Some('\n' | ';'))
    }

    fn describe(&mut self) -> String {
        self.skip_inline();
        match self.peek() {
            None => "end of input".into(),
            Some('\n') => "end of line".into(),
            Some(c) if word_char(c) => {
                let rest: String = self.src[self.at..].chars().take_while(|&c| word_char(c) || c == '-').collect();
                format!("`{rest}`")
            }
            Some(c) => format!("`{c}`"),
        }
    }

    fn error<T>(&mut self, expected: &[&str]) -> PResult<T> {
        self.skip_inline();
        let pos = self.pos();
        let found = self.describe();
        Err(SyntaxError { pos, found, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn word(&mut self) -> Option<Spanned<String>> {
        self.skip_inline();
        let pos = self.pos();
        let start = self.at;
        while let Some(c) = self.peek() {
            let joins = c == '-' && self.at > start && self.peek2().is_some_and(|d| d.is_alphanumeric());
            if word_char(c) || joins {
                self.bump();
            } else {
                break;
            }
        }
        (self.at > start).then(|| Spanned { value: self.src[start..self.at].to_string(), pos })
    }

    fn ident(&mut self, what: &str) -> PResult<Spanned<String>> {
        let save = (self.at, self.line, self.col);
        match self.word() {
            Some(w) if w.value.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') => Ok(w),
            _ => {
                (self.at, self.line, self.col) = save;
                self.error(&[what])
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        let save = (self.at, self.line, self.col);
        match self.word() {
            Some(w) if w.value == kw => Ok(()),
            _ => {
                (self.at, self.line, self.col) = save;
                self.error(&[&format!("`{kw}`")])
            }
        }
    }

    fn punct(&mut self, p: &str) -> PResult<()> {
        self.skip_inline();
        if self.src[self.at..].starts_with(p) {
            for _ in p.chars() {
                self.bump();
            }
            Ok(())
        } else {
            self.error(&[&format!("`{p}`")])
        }
    }

    fn number(&mut self) -> PResult<Spanned<u64>> {
        let save = (self.at, self.line, self.col);
        if let Some(w) = self.word() {
            if let Ok(v) = w.value.parse::<u64>() {
                return Ok(Spanned { value: v, pos: w.pos });
            }
        }
        (self.at, self.line, self.col) = save;
        self.error(&["number"])
    }

    /// Text up to the bracket matching `open`, split at top-level commas.
    fn list(&mut self, open: char, close: char) -> PResult<(Vec<Spanned<String>>, Pos)> {
        self.skip_inline();
        let pos = self.pos();
        if self.peek() != Some(open) {
            return self.error(&[&format!("`{open}`")]);
        }
        self.bump();
        let mut items = Vec::new();
        let mut depth = 0usize;
        let mut start = self.at;
        let mut start_pos = self.pos();
        loop {
            let Some(c) = self.peek() else {
                return self.error(&[&format!("`{close}`")]);
            };
            if depth == 0 && (c == close || c == ',') {
                let raw = &self.src[start..self.at];
                let lead = raw.len() - raw.trim_start().len();
                let mut item = Spanned { value: raw.to_string(), pos: start_pos };
                item.pos = item.pos_at(lead);
                item.value = raw.trim().to_string();
                if !item.value.is_empty() || c == ',' {
                    if item.value.is_empty() {
                        return self.error(&["expression"]);
                    }
                    items.push(item);
                }
                self.bump();
                if c == close {
                    break;
                }
                start = self.at;
                start_pos = self.pos();
                continue;
            }
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth = depth.saturating_sub(1),
                _ => {}
            }
            self.bump();
        }
        Ok((items, pos))
    }

    fn string(&mut self) -> PResult<Spanned<String>> {
        self.skip_inline();
        let pos = self.pos();
        if self.peek() != Some('"') {
            return self.error(&["string"]);
        }
        self.bump();
        let start = self.at;
        while self.peek().is_some_and(|c| c != '"' && c != '\n') {
            self.bump();
        }
        if self.peek() != Some('"') {
            return self.error(&["`\"`"]);
        }
        let value = self.src[start..self.at].to_string();
        self.bump();
        Ok(Spanned { value, pos })
    }

    fn names(&mut self) -> PResult<Vec<Spanned<String>>> {
        let (items, _) = self.list('[', ']')?;
        for it in &items {
            let ok = it.value.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && it.value.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !ok {
                return Err(SyntaxError { pos: it.pos, found: format!("`{}`", it.value), expected: vec!["name".into()] });
            }
        }
        Ok(items)
    }

    fn field(&mut self) -> PResult<Spanned<u32>> {
        self.keyword("GF")?;
        self.punct("(")?;
        let n = self.number()?;
        self.punct(")")?;
        match u32::try_from(n.value) {
            Ok(v) => Ok(Spanned { value: v, pos: n.pos }),
            Err(_) => Err(SyntaxError { pos: n.pos, found: n.value.to_string(), expected: vec!["prime below 2^16".into()] }),
        }
    }

    fn relations(&mut self) -> PResult<Vec<Spanned<String>>> {
        self.punct("/")?;
        Ok(self.list('(', ')')?.0)
    }

    fn decl(&mut self, kw: &str) -> PResult<Decl> {
        let name = self.ident("name")?;
        match kw {
            "base" => {
                self.punct("=")?;
                let p = self.field()?;
                let vars = self.names()?;
                let relations = if self.at_statement_end() { Vec::new() } else { self.relations()? };
                Ok(Decl::Base { name, p, vars, relations })
            }
            "algebra" => {
                self.keyword("over")?;
                self.skip_inline();
                let over = if self.src[self.at..].starts_with("GF(") {
                    BaseRef::Field(self.field()?.value)
                } else {
                    BaseRef::Named(self.ident("base name or `GF(p)`")?)
                };
                self.punct("=")?;
                let gens = self.names()?;
                let relations = if self.at_statement_end() { Vec::new() } else { self.relations()? };
                let allow_zero = if self.at_statement_end() {
                    false
                } else {
                    self.keyword("allow_zero")?;
                    true
                };
                Ok(Decl::Algebra { name, over, gens, relations, allow_zero })
            }
            "morphism" => {
                self.punct(":")?;
                let source = self.ident("source algebra")?;
                self.punct("->")?;
                let target = self.ident("target algebra")?;
                self.punct("=")?;
                let (items, _) = self.list('{', '}')?;
                let mut images = Vec::new();
                for it in items {
                    let Some(k) = it.value.find("->") else {
                        return Err(SyntaxError { pos: it.pos, found: format!("`{}`", it.value), expected: vec!["`gen -> image`".into()] });
                    };
                    let g = it.value[..k].trim().to_string();
                    let rest = &it.value[k + 2..];
                    let lead = rest.len() - rest.trim_start().len();
                    let img = Spanned { value: rest.trim().to_string(), pos: it.pos_at(k + 2 + lead) };
                    images.push((Spanned { value: g, pos: it.pos }, img));
                }
                Ok(Decl::Morphism { name, source, target, images })
            }
            "subalgebra" => {
                self.keyword("of")?;
                let ambient = self.ident("algebra name")?;
                self.punct("=")?;
                let (gens, _) = self.list('<', '>')?;
                Ok(Decl::Subalgebra { name, ambient, gens })
            }
            "pregroupoid" => {
                self.punct("=")?;
                let path = self.string()?;
                Ok(Decl::Pregroupoid { name, path })
            }
            _ => unreachable!(),
        }
    }

    fn command(&mut self, name: Spanned<String>) -> PResult<Command> {
        let mut args = Vec::new();
        while !self.at_statement_end() {
            let arg = match self.peek() {
                Some('(') => {
                    let (items, pos) = self.list('(', ')')?;
                    Arg::List(items, pos)
                }
                Some('"') => Arg::Text(self.string()?),
                Some(c) if c.is_ascii_digit() => Arg::Number(self.number()?),
                Some(c) if word_char(c) => Arg::Word(self.word().expect("word start")),
                _ => return self.error(&["argument", "end of line"]),
            };
            args.push(arg);
        }
        Ok(Command { name, args })
    }

    fn statement(&mut self) -> PResult<Statement> {
        let save = (self.at, self.line, self.col);
        let Some(w) = self.word() else {
            let mut expected: Vec<&str> = DECLARATIONS.to_vec();
            expected.extend(COMMANDS);
            return self.error(&expected);
        };
        let st = if DECLARATIONS.contains(&w.value.as_str()) {
            Statement::Decl(self.decl(&w.value.clone())?)
        } else if COMMANDS.contains(&w.value.as_str()) {
            Statement::Command(self.command(w)?)
        } else {
            (self.at, self.line, self.col) = save;
            let mut expected: Vec<&str> = DECLARATIONS.to_vec();
            expected.extend(COMMANDS);
            return self.error(&expected);
        };
        if !self.at_statement_end() {
            return self.error(&["end of line"]);
        }
        Ok(st)
    }
}

/// Parses a whole script into statements.
pub fn parse_statements(src: &str) -> Result<Vec<Statement>, SyntaxError> {
    let mut lx = Lexer { src, at: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        lx.skip_all();
        if lx.peek().is_none() {
            return Ok(out);
        }
        out.push(lx.statement()?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations_and_commands() {
        let src = "base R = GF(3)[u] / ()\nalgebra A over R = [x] / (x^3 - x - u)  # etale\n\
                   morphism f : A -> A = {x -> x + u}; preperfect A steps 2 probe (x, x + u)\n";
        let st = parse_statements(src).unwrap();
        assert_eq!(st.len(), 4);
        match &st[1] {
            Statement::Decl(Decl::Algebra { relations, gens, .. }) => {
                assert_eq!(gens[0].value, "x");
                assert_eq!(relations[0].value, "x^3 - x - u");
                assert_eq!(relations[0].pos, Pos { line: 2, col: 27 });
            }
            other => panic!("{other:?}"),
        }
        match &st[3] {
            Statement::Command(c) => {
                assert_eq!(c.name.value, "preperfect");
                assert_eq!(c.args.len(), 5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_lists() {
        let st = parse_statements("certify A ((x + y)*t, v)").unwrap();
        let Statement::Command(c) = &st[0] else { panic!() };
        let Arg::List(items, _) = &c.args[1] else { panic!() };
        assert_eq!(items.iter().map(|i| i.value.as_str()).collect::<Vec<_>>(), ["(x + y)*t", "v"]);
    }

    #[test]
    fn misspelled_keyword() {
        let err = parse_statements("base R = GF(3)[u]\nalgbra A over R = [x]").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 1 });
        assert_eq!(err.found, "`algbra`");
        assert!(err.expected.contains(&"algebra".to_string()));
    }

    #[test]
    fn missing_bracket() {
        let err = parse_statements("algebra A over GF(3) = [x / (x)").unwrap_err();
        assert!(err.expected.contains(&"`]`".to_string()), "{err}");
    }

    #[test]
    fn hyphenated_commands_and_paths() {
        let st = parse_statements("pi0-ring E\ngpd-close fixtures/tree.json").unwrap();
        let Statement::Command(c) = &st[1] else { panic!() };
        assert_eq!(c.name.value, "gpd-close");
        assert!(matches!(&c.args[0], Arg::Word(w) if w.value == "fixtures/tree.json"));
    }
}
