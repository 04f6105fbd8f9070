//! Line-oriented text format.
//!
//! ```text
//! # comment
//! vertices: a, b, c, d
//! edges:
//!   ab: a -> b
//!   ...
//! squares:
//!   s: [left, right, bottom, top]
//! cubes:
//!   c: [d10, d11, d20, d21, d30, d31]
//! ```
//!
//! Section keys start in the first column; entries are indented. Vertices
//! may also be listed inline after the key or one per line. A grid
//! document instead holds `grid: [n1, n2]` and optionally
//! `forbidden: [[i, j], ...]`.

use super::{CellInventory, GridPospace, PrecubicalSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Cells(CellInventory),
    Grid(GridPospace),
}

impl Document {
    pub fn build(&self) -> Result<PrecubicalSet> {
        match self {
            Document::Cells(inv) => PrecubicalSet::new(inv),
            Document::Grid(g) => g.build(),
        }
    }
}

pub fn parse_precubical(text: &str) -> Result<PrecubicalSet> {
    parse_document(text)?.build()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Colon,
    Comma,
    Open,
    Close,
    Arrow,
}

struct Line {
    number: usize,
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '+' | '\'')
}

fn tokenize(number: usize, raw: &str) -> Result<Line> {
    let text = raw.split('#').next().unwrap_or("");
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '[' => Tok::Open,
            ']' => Tok::Close,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            c if is_name_char(c) => {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                toks.push((Tok::Name(chars[start..i].iter().collect()), col));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    line: number,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        toks.push((tok, col));
        i += 1;
    }
    Ok(Line { number, toks, end: chars.len() + 1 })
}

struct Cursor<'a> {
    line: &'a Line,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let column = self.line.toks.get(self.pos).map_or(self.line.end, |t| t.1);
        Err(Error::Syntax { line: self.line.number, column, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.line.toks.get(self.pos).map(|t| &t.0)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a name"),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let n = self.name()?;
        match n.parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos -= 1;
                self.err(format!("expected a nonnegative integer, found `{n}`"))
            }
        }
    }

    fn done(&self) -> Result<()> {
        if self.pos == self.line.toks.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    /// `[x, y, ...]` with a per-item parser.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect(Tok::Open, "`[`")?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::Close) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return self.err("expected `,` or `]`"),
            }
        }
    }

    fn names_inline(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.name()?);
            if self.peek().is_some() {
                self.expect(Tok::Comma, "`,`")?;
                if self.peek().is_none() {
                    return self.err("expected a name after `,`");
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Vertices,
    Edges,
    Squares,
    Cubes,
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut inv = CellInventory { cells: vec![Vec::new(); 4] };
    let mut section = Section::None;
    let mut grid: Option<Vec<usize>> = None;
    let mut forbidden: Option<Vec<Vec<usize>>> = None;
    let mut seen_cells = false;
    let mut grid_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line = tokenize(k + 1, raw)?;
        if line.toks.is_empty() {
            continue;
        }
        let indented = raw.starts_with(char::is_whitespace);
        let mut cur = Cursor { line: &line, pos: 0 };
        if !indented {
            let key = cur.name()?;
            cur.expect(Tok::Colon, "`:` after section key")?;
            section = Section::None;
            match key.as_str() {
                "vertices" => {
                    section = Section::Vertices;
                    for n in cur.names_inline()? {
                        inv.cells[0].push((n, vec![]));
                    }
                    seen_cells = true;
                }
                "edges" | "squares" | "cubes" => {
                    cur.done()?;
                    section = match key.as_str() {
                        "edges" => Section::Edges,
                        "squares" => Section::Squares,
                        _ => Section::Cubes,
                    };
                    seen_cells = true;
                }
                "grid" => {
                    if grid.is_some() {
                        cur.pos = 0;
                        return cur.err("duplicate `grid` key");
                    }
                    grid = Some(cur.list(|c| c.number())?);
                    grid_line = line.number;
                    cur.done()?;
                }
                "forbidden" => {
                    if forbidden.is_some() {
                        cur.pos = 0;
                        return cur.err("duplicate `forbidden` key");
                    }
                    forbidden = Some(cur.list(|c| c.list(|c| c.number()))?);
                    cur.done()?;
                }
                other => {
                    cur.pos = 0;
                    return cur.err(format!("unknown key `{other}`"));
                }
            }
            continue;
        }
        match section {
            Section::None => return cur.err("entry outside of a cell section"),
            Section::Vertices => {
                for n in cur.names_inline()? {
                    inv.cells[0].push((n, vec![]));
                }
            }
            Section::Edges => {
                let n = cur.name()?;
                cur.expect(Tok::Colon, "`:`")?;
                let s = cur.name()?;
                cur.expect(Tok::Arrow, "`->`")?;
                let t = cur.name()?;
                cur.done()?;
                inv.cells[1].push((n, vec![s, t]));
            }
            Section::Squares | Section::Cubes => {
                let (dim, want) = if section == Section::Squares { (2, 4) } else { (3, 6) };
                let n = cur.name()?;
                cur.expect(Tok::Colon, "`:`")?;
                let start = cur.pos;
                let fs = cur.list(|c| c.name())?;
                if fs.len() != want {
                    cur.pos = start;
                    return cur.err(format!("expected {want} faces, found {}", fs.len()));
                }
                cur.done()?;
                inv.cells[dim].push((n, fs));
            }
        }
    }

    match (grid, seen_cells) {
        (Some(_), true) => Err(Error::Syntax {
            line: grid_line,
            column: 1,
            message: "a document is either a grid or a cell listing, not both".into(),
        }),
        (Some(extents), false) => Ok(Document::Grid(GridPospace { extents, forbidden: forbidden.unwrap_or_default() })),
        (None, _) if forbidden.is_some() => {
            Err(Error::Syntax { line: 1, column: 1, message: "`forbidden` requires a `grid` key".into() })
        }
        (None, _) => Ok(Document::Cells(inv)),
    }
}

pub(super) fn serialize(x: &PrecubicalSet) -> String {
    let mut out = String::new();
    out.push_str("vertices: ");
    out.push_str(&x.names(0).join(", "));
    out.push('\n');
    let sections = ["edges", "squares", "cubes"];
    for d in 1..=x.dimension() {
        out.push_str(sections[d - 1]);
        out.push_str(":\n");
        for c in 0..x.count(d) {
            let faces: Vec<&str> = x.faces(d, c).iter().map(|&f| x.name(d - 1, f)).collect();
            if d == 1 {
                out.push_str(&format!("  {}: {} -> {}\n", x.name(d, c), faces[0], faces[1]));
            } else {
                out.push_str(&format!("  {}: [{}]\n", x.name(d, c), faces.join(", ")));
            }
        }
    }
    out
}
