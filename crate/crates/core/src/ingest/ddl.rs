//! Parser and printer for the `CREATE TABLE` subset used for schema files.
//!
//! ```text
//! CREATE TABLE name ( col type {, col type} , PRIMARY KEY (cols)
//!                     {, FOREIGN KEY (cols) REFERENCES tbl (cols)} );
//! type := TEXT | INTEGER | DATE | ENUM('v' {, 'v'})
//! ```
//!
//! Keywords are case-insensitive, `--` starts a line comment, identifiers are
//! bare (`[A-Za-z0-9_]+`) or double-quoted.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{AttrType, Attribute, ForeignKey, RelationDecl, SchemaDecl};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Quoted(q) => format!("\"{q}\""),
            Tok::Str(s) => format!("'{s}'"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let syntax = |expected: &str, found: String| Error::DdlSyntax {
            line: l,
            column: col,
            expected: expected.to_string(),
            found,
        };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '-' => {
                bump!();
                if chars.peek() != Some(&'-') {
                    return Err(syntax("`--` comment", "`-`".into()));
                }
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' | ')' | ',' | ';' => {
                bump!();
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    _ => Tok::Semi,
                };
                out.push(Spanned {
                    tok,
                    line: l,
                    column: col,
                });
            }
            '"' | '\'' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None => {
                            return Err(syntax(
                                if c == '"' { "closing `\"`" } else { "closing `'`" },
                                "end of input".into(),
                            ))
                        }
                        Some(q) if q == c => {
                            if chars.peek() == Some(&c) {
                                bump!();
                                s.push(c);
                            } else {
                                break;
                            }
                        }
                        Some(other) => s.push(other),
                    }
                }
                let tok = if c == '"' {
                    if s.is_empty() {
                        return Err(syntax("identifier", "empty quoted identifier".into()));
                    }
                    Tok::Quoted(s)
                } else {
                    Tok::Str(s)
                };
                out.push(Spanned {
                    tok,
                    line: l,
                    column: col,
                });
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        w.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Word(w),
                    line: l,
                    column: col,
                });
            }
            other => return Err(syntax("token", format!("`{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let t = self.peek();
        Error::DdlSyntax {
            line: t.line,
            column: t.column,
            expected: expected.to_string(),
            found: t.tok.describe(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.error(kw))
        }
    }

    fn punct(&mut self, tok: Tok) -> Result<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Word(w) | Tok::Quoted(w) => {
                let w = w.clone();
                self.next();
                Ok(w)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        self.punct(Tok::LParen)?;
        let mut out = vec![self.ident()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            out.push(self.ident()?);
        }
        self.punct(Tok::RParen)?;
        Ok(out)
    }

    fn column_type(&mut self) -> Result<AttrType> {
        let word = match &self.peek().tok {
            Tok::Word(w) => w.to_ascii_uppercase(),
            _ => return Err(self.error("TEXT, INTEGER, DATE or ENUM")),
        };
        let ty = match word.as_str() {
            "TEXT" => AttrType::Text,
            "INTEGER" => AttrType::Integer,
            "DATE" => AttrType::Date,
            "ENUM" => {
                self.next();
                self.punct(Tok::LParen)?;
                let mut values = Vec::new();
                loop {
                    match &self.peek().tok {
                        Tok::Str(s) => {
                            values.push(s.clone());
                            self.next();
                        }
                        _ => return Err(self.error("string literal")),
                    }
                    if self.peek().tok == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.punct(Tok::RParen)?;
                return Ok(AttrType::Enumerated(values));
            }
            _ => return Err(self.error("TEXT, INTEGER, DATE or ENUM")),
        };
        self.next();
        Ok(ty)
    }

    fn statement(&mut self) -> Result<RelationDecl> {
        self.keyword("CREATE")?;
        self.keyword("TABLE")?;
        let name = self.ident()?;
        self.punct(Tok::LParen)?;

        let mut attributes = Vec::new();
        loop {
            if self.is_keyword("PRIMARY") {
                break;
            }
            let col = self.ident()?;
            let ty = self.column_type()?;
            attributes.push(Attribute::new(col, ty));
            self.punct(Tok::Comma)?;
        }
        if attributes.is_empty() {
            return Err(self.error("column definition"));
        }
        self.keyword("PRIMARY")?;
        self.keyword("KEY")?;
        let primary_key = self.ident_list()?;

        let mut foreign_keys = Vec::new();
        while self.peek().tok == Tok::Comma {
            self.next();
            self.keyword("FOREIGN")?;
            self.keyword("KEY")?;
            let columns = self.ident_list()?;
            self.keyword("REFERENCES")?;
            let target = self.ident()?;
            let target_columns = self.ident_list()?;
            foreign_keys.push(ForeignKey {
                columns,
                target,
                target_columns,
            });
        }
        self.punct(Tok::RParen)?;
        self.punct(Tok::Semi)?;

        let decl = RelationDecl {
            name,
            attributes,
            primary_key,
            foreign_keys,
        };
        decl.validate()?;
        Ok(decl)
    }
}

/// Parses a schema file. Declaration order is preserved.
pub fn parse_ddl(text: &str) -> Result<SchemaDecl> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut relations: Vec<RelationDecl> = Vec::new();
    while parser.peek().tok != Tok::Eof {
        let decl = parser.statement()?;
        if relations.iter().any(|r| r.name.eq_ignore_ascii_case(&decl.name)) {
            return Err(Error::DuplicateTable(decl.name));
        }
        relations.push(decl);
    }
    SchemaDecl::new(relations)
}

const KEYWORDS: &[&str] = &[
    "CREATE",
    "TABLE",
    "PRIMARY",
    "KEY",
    "FOREIGN",
    "REFERENCES",
    "TEXT",
    "INTEGER",
    "DATE",
    "ENUM",
];

/// Bare when the name is a plain identifier, double-quoted otherwise.
pub fn quote_ident(name: &str) -> String {
    let bare = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(name));
    if bare {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('"', "\"\""))
    }
}

/// Always double-quoted.
pub fn quote_column(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\"\""))
}

fn column_list(cols: &[String]) -> String {
    cols.iter().map(|c| quote_column(c)).collect::<Vec<_>>().join(", ")
}

/// Prints a schema in the grammar accepted by [`parse_ddl`].
pub fn to_ddl(schema: &SchemaDecl) -> String {
    let mut out = String::new();
    for rel in &schema.relations {
        let _ = writeln!(out, "CREATE TABLE {} (", quote_ident(&rel.name));
        for attr in &rel.attributes {
            let _ = writeln!(out, "  {} {},", quote_column(&attr.name), attr.ty);
        }
        let _ = write!(out, "  PRIMARY KEY ({})", column_list(&rel.primary_key));
        for fk in &rel.foreign_keys {
            let _ = write!(
                out,
                ",\n  FOREIGN KEY ({}) REFERENCES {} ({})",
                column_list(&fk.columns),
                quote_ident(&fk.target),
                column_list(&fk.target_columns)
            );
        }
        out.push_str("\n);\n");
    }
    out
}
