//! Recursive-descent parser for the Java subset used by the analysis.
//!
//! Method bodies, class bodies and blocks are delimited by brace matching
//! before they are parsed, so damage inside one body cannot spill into its
//! siblings. Statement-level errors are recorded and parsing resumes at the
//! next `;` on the same nesting level.

use std::collections::HashMap;
use std::path::PathBuf;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};

type PResult<T> = Result<T, ParseError>;

/// Parses one file. Never fails; problems are reported in `parse_errors`.
pub fn parse_unit(text: &str, path: impl Into<PathBuf>) -> SourceUnit {
    let tokens = tokenize(text);
    let mut p = Parser {
        toks: &tokens,
        text,
        pos: 0,
        end: tokens.len(),
        prev_end: 0,
        errors: Vec::new(),
    };
    for t in &tokens {
        if let Tok::Error(msg) = &t.tok {
            p.errors.push(ParseError {
                span: t.span,
                message: msg.clone(),
            });
        }
    }
    let mut unit = SourceUnit {
        path: path.into(),
        package: None,
        imports: Vec::new(),
        types: Vec::new(),
        parse_errors: Vec::new(),
        len: text.len(),
    };
    p.parse_compilation_unit(&mut unit);
    for ty in &mut unit.types {
        retype_plus_in_type(ty);
    }
    let mut errors = p.errors;
    errors.sort_by_key(|e| (e.span.start, e.span.end));
    unit.parse_errors = errors;
    unit
}

/// Parses raw bytes, replacing invalid UTF-8.
pub fn parse_bytes(bytes: &[u8], path: impl Into<PathBuf>) -> SourceUnit {
    parse_unit(&String::from_utf8_lossy(bytes), path)
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

const TYPE_KEYWORDS: &[&str] = &["class", "interface", "enum", "record"];

struct Parser<'t> {
    toks: &'t [Token],
    text: &'t str,
    pos: usize,
    end: usize,
    prev_end: usize,
    errors: Vec<ParseError>,
}

impl<'t> Parser<'t> {
    fn sub(&self, start: usize, end: usize) -> Parser<'t> {
        Parser {
            toks: self.toks,
            text: self.text,
            pos: start,
            end,
            prev_end: self.toks.get(start.saturating_sub(1)).map_or(0, |t| t.span.end),
            errors: Vec::new(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.end
    }

    fn peek(&self) -> Option<&'t Token> {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        if self.pos + n < self.end {
            self.toks.get(self.pos + n)
        } else {
            None
        }
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.peek()?;
        self.pos += 1;
        self.prev_end = t.span.end;
        Some(t)
    }

    fn is_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn is_ident(&self, s: &str) -> bool {
        self.peek().is_some_and(|t| t.is_ident(s))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn cur_start(&self) -> usize {
        self.peek().map_or(self.prev_end, |t| t.span.start)
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let span = match self.peek() {
            Some(t) => t.span,
            None => Span::new(self.prev_end, self.prev_end),
        };
        ParseError {
            span,
            message: message.into(),
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{p}`")))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error_here("expected identifier")),
        }
    }

    fn raw(&self, span: Span) -> String {
        self.text.get(span.start..span.end).unwrap_or("").to_string()
    }

    /// Index of the token closing the bracket opened at `open`, or `None`
    /// when unbalanced within the parser's window.
    fn matching(&self, open: usize) -> Option<usize> {
        let (o, c) = match &self.toks[open].tok {
            Tok::Punct("{") => ("{", "}"),
            Tok::Punct("(") => ("(", ")"),
            Tok::Punct("[") => ("[", "]"),
            _ => return None,
        };
        let mut depth = 0usize;
        for i in open..self.end {
            let t = &self.toks[i];
            if t.is_punct(o) {
                depth += 1;
            } else if t.is_punct(c) {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
        }
        None
    }

    /// Skips a balanced bracket group starting at the current token.
    fn skip_group(&mut self) -> PResult<()> {
        let open = self.pos;
        match self.matching(open) {
            Some(close) => {
                self.pos = close;
                self.bump();
                Ok(())
            }
            None => {
                let err = self.error_here("unbalanced bracket");
                self.pos = self.end;
                Err(err)
            }
        }
    }

    /// Skips `<...>` type arguments/parameters. Fails without consuming on
    /// tokens that cannot appear in a type argument list.
    fn skip_angles(&mut self) -> PResult<()> {
        let save = self.pos;
        let mut depth: i64 = 0;
        while let Some(t) = self.peek() {
            match &t.tok {
                Tok::Punct("<") => depth += 1,
                Tok::Punct(">") => depth -= 1,
                Tok::Punct(">>") => depth -= 2,
                Tok::Punct(">>>") => depth -= 3,
                Tok::Punct("," | "." | "?" | "&" | "[" | "]" | "...") | Tok::Ident(_) | Tok::At => {}
                _ => {
                    self.pos = save;
                    return Err(self.error_here("malformed type arguments"));
                }
            }
            self.bump();
            if depth <= 0 {
                if depth < 0 {
                    self.pos = save;
                    return Err(self.error_here("malformed type arguments"));
                }
                return Ok(());
            }
        }
        self.pos = save;
        Err(self.error_here("unterminated type arguments"))
    }

    /// Recovers after a statement or member error: skips to just past the
    /// next `;` on the current nesting level, or past a balanced `{...}`.
    fn recover(&mut self, start: usize) {
        if self.pos <= start && !self.at_end() {
            self.pos = start;
        }
        let mut depth = 0i64;
        let mut moved = false;
        while let Some(t) = self.peek() {
            match &t.tok {
                Tok::Punct("(" | "[") => depth += 1,
                Tok::Punct(")" | "]") => depth -= 1,
                Tok::Punct("{") => {
                    if self.skip_group().is_err() {
                        return;
                    }
                    moved = true;
                    if depth <= 0 {
                        self.eat_punct(";");
                        return;
                    }
                    continue;
                }
                Tok::Punct(";") if depth <= 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
            moved = true;
        }
        if !moved && !self.at_end() {
            self.bump();
        }
    }

    fn parse_compilation_unit(&mut self, unit: &mut SourceUnit) {
        while !self.at_end() {
            let start = self.pos;
            if self.eat_punct(";") {
                continue;
            }
            let res = if self.is_ident("package") {
                self.parse_package().map(|p| unit.package = Some(p))
            } else if self.is_ident("import") {
                self.parse_import().map(|i| unit.imports.push(i))
            } else if self.is_ident("module") || self.is_ident("open") {
                // module-info.java
                self.recover(start);
                Ok(())
            } else {
                self.parse_type_decl_with_mods(None)
                    .map(|mut tys| unit.types.append(&mut tys))
            };
            if let Err(e) = res {
                self.errors.push(e);
                self.recover(start);
            }
        }
    }

    fn parse_qualified(&mut self) -> PResult<String> {
        let mut name = self.expect_ident()?;
        while self.is_punct(".") && self.peek_at(1).and_then(Token::ident).is_some() {
            self.bump();
            name.push('.');
            name.push_str(&self.expect_ident()?);
        }
        Ok(name)
    }

    fn parse_package(&mut self) -> PResult<String> {
        self.bump();
        let name = self.parse_qualified()?;
        self.expect_punct(";")?;
        Ok(name)
    }

    fn parse_import(&mut self) -> PResult<Import> {
        let start = self.cur_start();
        self.bump();
        let is_static = self.eat_ident("static");
        let path = self.parse_qualified()?;
        let wildcard = if self.is_punct(".") && self.peek_at(1).is_some_and(|t| t.is_punct("*")) {
            self.bump();
            self.bump();
            true
        } else {
            false
        };
        self.expect_punct(";")?;
        Ok(Import {
            path,
            is_static,
            wildcard,
            span: Span::new(start, self.prev_end),
        })
    }

    fn parse_annotation(&mut self) -> PResult<Annotation> {
        let start = self.cur_start();
        if !matches!(self.peek().map(|t| &t.tok), Some(Tok::At)) {
            return Err(self.error_here("expected annotation"));
        }
        self.bump();
        let name = self.parse_qualified()?;
        let mut args = Vec::new();
        if self.is_punct("(") {
            self.bump();
            while !self.is_punct(")") {
                if self.at_end() {
                    return Err(self.error_here("unterminated annotation arguments"));
                }
                let named =
                    self.peek().and_then(Token::ident).is_some() && self.peek_at(1).is_some_and(|t| t.is_punct("="));
                let arg_name = if named {
                    let n = self.expect_ident()?;
                    self.bump();
                    Some(n)
                } else {
                    None
                };
                let value = self.parse_expr()?;
                args.push(AnnotationArg { name: arg_name, value });
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        Ok(Annotation {
            name,
            args,
            span: Span::new(start, self.prev_end),
        })
    }

    fn is_annotation_start(&self) -> bool {
        matches!(self.peek().map(|t| &t.tok), Some(Tok::At))
            && !self.peek_at(1).is_some_and(|t| t.is_ident("interface"))
    }

    fn parse_modifiers(&mut self) -> PResult<(Modifiers, Vec<Annotation>)> {
        let mut mods = Modifiers::default();
        let mut anns = Vec::new();
        loop {
            if self.is_annotation_start() {
                anns.push(self.parse_annotation()?);
                continue;
            }
            match self.peek().and_then(Token::ident) {
                Some(m) if MODIFIERS.contains(&m) => {
                    // `default` as a switch label never reaches here.
                    match m {
                        "static" => mods.is_static = true,
                        "final" => mods.is_final = true,
                        "transient" => mods.is_transient = true,
                        _ => {}
                    }
                    self.bump();
                }
                Some("non") if self.peek_at(1).is_some_and(|t| t.is_punct("-")) => {
                    self.bump();
                    self.bump();
                    self.bump();
                }
                _ => break,
            }
        }
        Ok((mods, anns))
    }

    fn at_type_keyword(&self) -> bool {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Ident(s)) => {
                TYPE_KEYWORDS.contains(&s.as_str())
                    && (s != "record" || self.peek_at(2).is_some_and(|t| t.is_punct("(") || t.is_punct("<")))
            }
            Some(Tok::At) => self.peek_at(1).is_some_and(|t| t.is_ident("interface")),
            _ => false,
        }
    }

    /// Parses a type declaration preceded by modifiers. Returns the type
    /// followed by all of its nested types.
    fn parse_type_decl_with_mods(&mut self, outer: Option<&str>) -> PResult<Vec<TypeDecl>> {
        let start = self.cur_start();
        let (_, anns) = self.parse_modifiers()?;
        if !self.at_type_keyword() {
            return Err(self.error_here("expected type declaration"));
        }
        self.parse_type_decl(start, anns, outer)
    }

    fn parse_type_decl(
        &mut self,
        start: usize,
        annotations: Vec<Annotation>,
        outer: Option<&str>,
    ) -> PResult<Vec<TypeDecl>> {
        let kind = match self.bump().map(|t| &t.tok) {
            Some(Tok::At) => {
                self.bump();
                TypeKind::Annotation
            }
            Some(Tok::Ident(k)) => match k.as_str() {
                "class" => TypeKind::Class,
                "interface" => TypeKind::Interface,
                "enum" => TypeKind::Enum,
                _ => TypeKind::Record,
            },
            _ => return Err(self.error_here("expected type keyword")),
        };
        let name = self.expect_ident()?;
        if self.is_punct("<") {
            self.skip_angles()?;
        }
        let mut fields = Vec::new();
        if kind == TypeKind::Record && self.is_punct("(") {
            for p in self.parse_params()? {
                fields.push(FieldDecl {
                    name: p.name,
                    type_name: p.type_name,
                    declared_type: p.declared_type,
                    modifiers: Modifiers {
                        is_final: true,
                        ..Modifiers::default()
                    },
                    annotations: p.annotations,
                    initializer: None,
                    span: p.span,
                });
            }
        }
        // extends / implements / permits
        while !self.is_punct("{") {
            if self.at_end() || self.is_punct(";") || self.is_punct("}") {
                return Err(self.error_here("expected type body"));
            }
            if self.is_punct("<") {
                self.skip_angles()?;
            } else {
                self.bump();
            }
        }
        let open = self.pos;
        let Some(close) = self.matching(open) else {
            let err = self.error_here("unclosed type body");
            // Parse what is there, then report.
            let mut body = self.sub(open + 1, self.end);
            let (mut f, methods, nested) = body.parse_class_body(&name, kind);
            self.errors.append(&mut body.errors);
            self.errors.push(err);
            self.pos = self.end;
            fields.append(&mut f);
            let span = Span::new(start, self.prev_end.max(start));
            return Ok(self.assemble(name, kind, outer, annotations, fields, methods, nested, span));
        };
        let mut body = self.sub(open + 1, close);
        let (mut f, methods, nested) = body.parse_class_body(&name, kind);
        self.errors.append(&mut body.errors);
        fields.append(&mut f);
        self.pos = close;
        self.bump();
        let span = Span::new(start, self.prev_end);
        Ok(self.assemble(name, kind, outer, annotations, fields, methods, nested, span))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &self,
        name: String,
        kind: TypeKind,
        outer: Option<&str>,
        annotations: Vec<Annotation>,
        fields: Vec<FieldDecl>,
        methods: Vec<MethodDecl>,
        mut nested: Vec<TypeDecl>,
        span: Span,
    ) -> Vec<TypeDecl> {
        let mut out = vec![TypeDecl {
            name,
            kind,
            outer: outer.map(str::to_string),
            annotations,
            fields,
            methods,
            span,
        }];
        out.append(&mut nested);
        out
    }

    fn parse_class_body(
        &mut self,
        type_name: &str,
        kind: TypeKind,
    ) -> (Vec<FieldDecl>, Vec<MethodDecl>, Vec<TypeDecl>) {
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        let mut nested = Vec::new();
        if kind == TypeKind::Enum {
            if let Err(e) = self.skip_enum_constants() {
                self.errors.push(e);
            }
        }
        while !self.at_end() {
            let start = self.pos;
            if self.eat_punct(";") {
                continue;
            }
            match self.parse_member(type_name, kind) {
                Ok(Member::Fields(mut f)) => fields.append(&mut f),
                Ok(Member::Method(m)) => methods.push(m),
                Ok(Member::Types(mut t)) => nested.append(&mut t),
                Err(e) => {
                    self.errors.push(e);
                    self.recover(start);
                }
            }
        }
        (fields, methods, nested)
    }

    fn skip_enum_constants(&mut self) -> PResult<()> {
        loop {
            while self.is_annotation_start() {
                self.parse_annotation()?;
            }
            if self.eat_punct(";") || self.at_end() {
                return Ok(());
            }
            if self.peek().and_then(Token::ident).is_none() {
                return Ok(());
            }
            // A member declaration, not a constant, when the enum has no `;`.
            if self.peek_at(1).is_some_and(|t| t.ident().is_some()) {
                return Ok(());
            }
            self.bump();
            if self.is_punct("(") {
                self.skip_group()?;
            }
            if self.is_punct("{") {
                self.skip_group()?;
            }
            if !self.eat_punct(",") {
                self.eat_punct(";");
                return Ok(());
            }
        }
    }

    fn parse_member(&mut self, type_name: &str, kind: TypeKind) -> PResult<Member> {
        let start = self.cur_start();
        if self.is_punct("{") || (self.is_ident("static") && self.peek_at(1).is_some_and(|t| t.is_punct("{"))) {
            let name = if self.eat_ident("static") { "<clinit>" } else { "<init>" };
            let body = self.parse_block_body()?;
            return Ok(Member::Method(MethodDecl {
                name: name.into(),
                return_type: "void".into(),
                params: Vec::new(),
                annotations: Vec::new(),
                body: Some(body),
                is_constructor: false,
                span: Span::new(start, self.prev_end),
            }));
        }
        let (mods, annotations) = self.parse_modifiers()?;
        if self.at_type_keyword() {
            return self
                .parse_type_decl(start, annotations, Some(type_name))
                .map(Member::Types);
        }
        if self.is_punct("<") {
            self.skip_angles()?;
        }
        let is_ctor = self.is_ident(type_name) && self.peek_at(1).is_some_and(|t| t.is_punct("("));
        let (return_type, name) = if is_ctor {
            (String::new(), self.expect_ident()?)
        } else {
            let ty = self.parse_type()?;
            (ty, self.expect_ident()?)
        };
        if self.is_punct("(") {
            let params = self.parse_params()?;
            while self.is_punct("[") {
                self.bump();
                self.expect_punct("]")?;
            }
            if self.eat_ident("throws") {
                self.parse_type()?;
                while self.eat_punct(",") {
                    self.parse_type()?;
                }
            }
            let body = if self.is_punct("{") {
                Some(self.parse_block_body()?)
            } else {
                if self.eat_ident("default") {
                    self.parse_expr()?;
                }
                self.expect_punct(";")?;
                None
            };
            let _ = kind;
            return Ok(Member::Method(MethodDecl {
                name,
                return_type,
                params,
                annotations,
                body,
                is_constructor: is_ctor,
                span: Span::new(start, self.prev_end),
            }));
        }
        // Field declarators.
        let mut fields = Vec::new();
        let mut name = name;
        let mut decl_start = start;
        loop {
            let mut ty = return_type.clone();
            while self.is_punct("[") {
                self.bump();
                self.expect_punct("]")?;
                ty.push_str("[]");
            }
            let initializer = if self.eat_punct("=") {
                Some(self.parse_var_init()?)
            } else {
                None
            };
            let end = self.prev_end;
            fields.push(FieldDecl {
                declared_type: DeclaredType::from_type_name(&ty),
                name,
                type_name: ty,
                modifiers: mods,
                annotations: annotations.clone(),
                initializer,
                span: Span::new(decl_start, end),
            });
            if self.eat_punct(",") {
                decl_start = self.cur_start();
                name = self.expect_ident()?;
                continue;
            }
            self.expect_punct(";")?;
            break;
        }
        Ok(Member::Fields(fields))
    }

    fn parse_var_init(&mut self) -> PResult<Expr> {
        self.parse_expr()
    }

    /// Parses a type reference with generics erased. Returns e.g. `String`,
    /// `Map.Entry`, `int[]`.
    fn parse_type(&mut self) -> PResult<String> {
        while self.is_annotation_start() {
            self.parse_annotation()?;
        }
        let mut name = self.expect_ident()?;
        if self.is_punct("<") {
            self.skip_angles()?;
        }
        while self.is_punct(".") && self.peek_at(1).and_then(Token::ident).is_some() {
            self.bump();
            while self.is_annotation_start() {
                self.parse_annotation()?;
            }
            name.push('.');
            name.push_str(&self.expect_ident()?);
            if self.is_punct("<") {
                self.skip_angles()?;
            }
        }
        loop {
            if self.is_punct("[") && self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
                self.bump();
                self.bump();
                name.push_str("[]");
            } else if self.is_punct("...") {
                self.bump();
                name.push_str("[]");
            } else {
                break;
            }
        }
        Ok(name)
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            if self.at_end() {
                return Err(self.error_here("unterminated parameter list"));
            }
            let start = self.cur_start();
            let (_, annotations) = self.parse_modifiers()?;
            let mut type_name = self.parse_type()?;
            let name = if self.is_ident("this") {
                self.bump();
                "this".to_string()
            } else {
                self.expect_ident()?
            };
            while self.is_punct("[") {
                self.bump();
                self.expect_punct("]")?;
                type_name.push_str("[]");
            }
            params.push(Param {
                declared_type: DeclaredType::from_type_name(&type_name),
                name,
                type_name,
                annotations,
                span: Span::new(start, self.prev_end),
            });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    /// Parses `{ stmts }` at the current position. The closing brace is
    /// located first; statement errors inside are recovered locally.
    fn parse_block_body(&mut self) -> PResult<Vec<Stmt>> {
        if !self.is_punct("{") {
            return Err(self.error_here("expected `{`"));
        }
        let open = self.pos;
        let (close, closed) = match self.matching(open) {
            Some(c) => (c, true),
            None => (self.end, false),
        };
        let mut inner = self.sub(open + 1, close);
        let stmts = inner.parse_stmts();
        self.errors.append(&mut inner.errors);
        if closed {
            self.pos = close;
            self.bump();
            Ok(stmts)
        } else {
            self.pos = self.end;
            self.prev_end = self
                .toks
                .get(self.end.saturating_sub(1))
                .map_or(self.prev_end, |t| t.span.end);
            self.errors.push(ParseError {
                span: self.toks[open].span,
                message: "unclosed block".into(),
            });
            Ok(stmts)
        }
    }

    fn parse_stmts(&mut self) -> Vec<Stmt> {
        let mut out = Vec::new();
        while !self.at_end() {
            let start = self.pos;
            match self.parse_stmt(&mut out) {
                Ok(()) => {
                    if self.pos == start {
                        // No progress; drop a token.
                        let e = self.error_here("unexpected token");
                        self.errors.push(e);
                        self.bump();
                    }
                }
                Err(e) => {
                    self.errors.push(e);
                    self.recover(start);
                }
            }
        }
        out
    }

    fn stmt_span(&self, start: usize) -> Span {
        Span::new(start, self.prev_end.max(start))
    }

    /// Parses one statement, pushing zero or more `Stmt`s (several for
    /// multi-declarator locals).
    fn parse_stmt(&mut self, out: &mut Vec<Stmt>) -> PResult<()> {
        let start = self.cur_start();
        let Some(tok) = self.peek() else {
            return Ok(());
        };
        if tok.is_punct(";") {
            self.bump();
            return Ok(());
        }
        if tok.is_punct("{") {
            let body = self.parse_block_body()?;
            out.push(Stmt {
                kind: StmtKind::Block(body),
                span: self.stmt_span(start),
            });
            return Ok(());
        }
        if let Some(kw) = tok.ident() {
            match kw {
                "if" => {
                    self.bump();
                    let cond = self.parse_paren_expr()?;
                    let mut body = Vec::new();
                    self.parse_stmt(&mut body)?;
                    if self.eat_ident("else") {
                        self.parse_stmt(&mut body)?;
                    }
                    out.push(self.control(start, vec![cond], body));
                    return Ok(());
                }
                "while" => {
                    self.bump();
                    let cond = self.parse_paren_expr()?;
                    let mut body = Vec::new();
                    self.parse_stmt(&mut body)?;
                    out.push(self.control(start, vec![cond], body));
                    return Ok(());
                }
                "do" => {
                    self.bump();
                    let mut body = Vec::new();
                    self.parse_stmt(&mut body)?;
                    if !self.eat_ident("while") {
                        return Err(self.error_here("expected `while`"));
                    }
                    let cond = self.parse_paren_expr()?;
                    self.expect_punct(";")?;
                    out.push(self.control(start, vec![cond], body));
                    return Ok(());
                }
                "for" => return self.parse_for(start, out),
                "try" => return self.parse_try(start, out),
                "switch" => {
                    self.bump();
                    let subject = self.parse_paren_expr()?;
                    let body = self.parse_switch_body()?;
                    out.push(self.control(start, vec![subject], body));
                    return Ok(());
                }
                "synchronized" if self.peek_at(1).is_some_and(|t| t.is_punct("(")) => {
                    self.bump();
                    let lock = self.parse_paren_expr()?;
                    let body = self.parse_block_body()?;
                    out.push(self.control(start, vec![lock], body));
                    return Ok(());
                }
                "return" => {
                    self.bump();
                    let value = if self.is_punct(";") {
                        None
                    } else {
                        Some(self.parse_expr()?)
                    };
                    self.expect_punct(";")?;
                    out.push(Stmt {
                        kind: StmtKind::Return(value),
                        span: self.stmt_span(start),
                    });
                    return Ok(());
                }
                "throw" | "yield"
                    if kw == "throw"
                        || !self
                            .peek_at(1)
                            .is_some_and(|t| t.is_punct("=") || t.is_punct(".") || t.is_punct("(")) =>
                {
                    self.bump();
                    let e = self.parse_expr()?;
                    self.expect_punct(";")?;
                    out.push(Stmt {
                        kind: StmtKind::Expr(e),
                        span: self.stmt_span(start),
                    });
                    return Ok(());
                }
                "break" | "continue" => {
                    self.bump();
                    if self.peek().and_then(Token::ident).is_some() {
                        self.bump();
                    }
                    self.expect_punct(";")?;
                    return Ok(());
                }
                "assert" => {
                    self.bump();
                    let e = self.parse_expr()?;
                    let mut exprs = vec![e];
                    if self.eat_punct(":") {
                        exprs.push(self.parse_expr()?);
                    }
                    self.expect_punct(";")?;
                    out.push(self.control(start, exprs, Vec::new()));
                    return Ok(());
                }
                "case" | "default"
                    if kw == "case" || self.peek_at(1).is_some_and(|t| t.is_punct(":") || t.is_punct("->")) =>
                {
                    // Switch labels; only valid inside a switch body.
                    self.skip_case_label()?;
                    return Ok(());
                }
                _ => {}
            }
            // Labeled statement.
            if self.peek_at(1).is_some_and(|t| t.is_punct(":")) {
                self.bump();
                self.bump();
                return self.parse_stmt(out);
            }
            // Local type declaration.
            let save = self.pos;
            let (_, anns) = self.parse_modifiers()?;
            if self.at_type_keyword() {
                let _ = self.parse_type_decl(start, anns, None)?;
                out.push(Stmt {
                    kind: StmtKind::Other,
                    span: self.stmt_span(start),
                });
                return Ok(());
            }
            self.pos = save;
        }
        if let Some(mut decls) = self.try_local_decl()? {
            self.expect_punct(";")?;
            let end = self.prev_end;
            if let Some(last) = decls.last_mut() {
                last.span.end = end;
            }
            out.append(&mut decls);
            return Ok(());
        }
        let e = self.parse_expr()?;
        self.expect_punct(";")?;
        out.push(self.expr_stmt(e, start));
        Ok(())
    }

    fn expr_stmt(&self, e: Expr, start: usize) -> Stmt {
        let span = self.stmt_span(start);
        match e.kind {
            ExprKind::Assign { target, op, value } => Stmt {
                kind: StmtKind::Assign {
                    target: *target,
                    op,
                    value: *value,
                },
                span,
            },
            kind => Stmt {
                kind: StmtKind::Expr(Expr { kind, span: e.span }),
                span,
            },
        }
    }

    fn control(&self, start: usize, exprs: Vec<Expr>, body: Vec<Stmt>) -> Stmt {
        Stmt {
            kind: StmtKind::Control { exprs, body },
            span: self.stmt_span(start),
        }
    }

    fn parse_paren_expr(&mut self) -> PResult<Expr> {
        self.expect_punct("(")?;
        let e = self.parse_expr()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    fn skip_case_label(&mut self) -> PResult<()> {
        self.bump();
        let mut depth = 0i64;
        while let Some(t) = self.peek() {
            if t.is_punct("(") || t.is_punct("{") || t.is_punct("[") {
                depth += 1;
            } else if t.is_punct(")") || t.is_punct("}") || t.is_punct("]") {
                depth -= 1;
            } else if depth == 0 && (t.is_punct(":") || t.is_punct("->")) {
                self.bump();
                return Ok(());
            }
            self.bump();
        }
        Err(self.error_here("unterminated case label"))
    }

    fn parse_switch_body(&mut self) -> PResult<Vec<Stmt>> {
        self.parse_block_body()
    }

    fn parse_for(&mut self, start: usize, out: &mut Vec<Stmt>) -> PResult<()> {
        self.bump();
        self.expect_punct("(")?;
        let mut body = Vec::new();
        let mut exprs = Vec::new();
        // for-each
        let save = self.pos;
        let foreach = (|| -> PResult<Option<Stmt>> {
            let decl_start = self.cur_start();
            self.parse_modifiers()?;
            let ty = self.parse_type()?;
            let name = self.expect_ident()?;
            if !self.eat_punct(":") {
                return Ok(None);
            }
            Ok(Some(Stmt {
                kind: StmtKind::LocalDecl {
                    declared_type: DeclaredType::from_type_name(&ty),
                    name,
                    type_name: ty,
                    init: None,
                },
                span: Span::new(decl_start, self.prev_end),
            }))
        })();
        match foreach {
            Ok(Some(decl)) => {
                body.push(decl);
                exprs.push(self.parse_expr()?);
                self.expect_punct(")")?;
            }
            _ => {
                self.pos = save;
                if !self.is_punct(";") {
                    if let Some(mut decls) = self.try_local_decl()? {
                        body.append(&mut decls);
                    } else {
                        let s = self.cur_start();
                        let e = self.parse_expr()?;
                        body.push(self.expr_stmt(e, s));
                        while self.eat_punct(",") {
                            let s = self.cur_start();
                            let e = self.parse_expr()?;
                            body.push(self.expr_stmt(e, s));
                        }
                    }
                }
                self.expect_punct(";")?;
                if !self.is_punct(";") {
                    exprs.push(self.parse_expr()?);
                }
                self.expect_punct(";")?;
                while !self.is_punct(")") {
                    let s = self.cur_start();
                    let e = self.parse_expr()?;
                    body.push(self.expr_stmt(e, s));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct(")")?;
            }
        }
        self.parse_stmt(&mut body)?;
        out.push(self.control(start, exprs, body));
        Ok(())
    }

    fn parse_try(&mut self, start: usize, out: &mut Vec<Stmt>) -> PResult<()> {
        self.bump();
        let mut body = Vec::new();
        if self.eat_punct("(") {
            while !self.is_punct(")") {
                if self.at_end() {
                    return Err(self.error_here("unterminated resources"));
                }
                match self.try_local_decl()? {
                    Some(mut d) => body.append(&mut d),
                    None => {
                        let s = self.cur_start();
                        let e = self.parse_expr()?;
                        body.push(self.expr_stmt(e, s));
                    }
                }
                if !self.eat_punct(";") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        let block = self.parse_block_body()?;
        body.push(Stmt {
            kind: StmtKind::Block(block),
            span: self.stmt_span(start),
        });
        while self.eat_ident("catch") {
            self.expect_punct("(")?;
            self.parse_modifiers()?;
            self.parse_type()?;
            while self.eat_punct("|") {
                self.parse_type()?;
            }
            self.expect_ident()?;
            self.expect_punct(")")?;
            let s = self.cur_start();
            let b = self.parse_block_body()?;
            body.push(Stmt {
                kind: StmtKind::Block(b),
                span: self.stmt_span(s),
            });
        }
        if self.eat_ident("finally") {
            let s = self.cur_start();
            let b = self.parse_block_body()?;
            body.push(Stmt {
                kind: StmtKind::Block(b),
                span: self.stmt_span(s),
            });
        }
        out.push(self.control(start, Vec::new(), body));
        Ok(())
    }

    /// Attempts `[mods] Type name [= init] {, name [= init]}` without the
    /// trailing `;`. Restores the position and returns `None` when the
    /// tokens do not form a declaration.
    fn try_local_decl(&mut self) -> PResult<Option<Vec<Stmt>>> {
        let save = self.pos;
        let save_end = self.prev_end;
        let start = self.cur_start();
        let restore = |p: &mut Self| {
            p.pos = save;
            p.prev_end = save_end;
        };
        if self.parse_modifiers().is_err() {
            restore(self);
            return Ok(None);
        }
        let Ok(ty) = self.parse_type() else {
            restore(self);
            return Ok(None);
        };
        let is_decl = self.peek().and_then(Token::ident).is_some()
            && self.peek_at(1).is_some_and(|t| {
                t.is_punct("=") || t.is_punct(";") || t.is_punct(",") || t.is_punct("[") || t.is_punct(":")
            });
        if !is_decl || matches!(ty.as_str(), "return" | "throw" | "new" | "yield") {
            restore(self);
            return Ok(None);
        }
        let mut out = Vec::new();
        let mut decl_start = start;
        loop {
            let name = self.expect_ident()?;
            let mut type_name = ty.clone();
            while self.is_punct("[") {
                self.bump();
                self.expect_punct("]")?;
                type_name.push_str("[]");
            }
            let init = if self.eat_punct("=") {
                Some(self.parse_var_init()?)
            } else {
                None
            };
            out.push(Stmt {
                kind: StmtKind::LocalDecl {
                    declared_type: DeclaredType::from_type_name(&type_name),
                    name,
                    type_name,
                    init,
                },
                span: Span::new(decl_start, self.prev_end),
            });
            if self.is_punct(",") && self.peek_at(1).and_then(Token::ident).is_some() {
                self.bump();
                decl_start = self.cur_start();
                continue;
            }
            break;
        }
        Ok(Some(out))
    }

    // ---- expressions ----

    fn parse_expr(&mut self) -> PResult<Expr> {
        if self.at_lambda() {
            return self.parse_lambda();
        }
        let start = self.cur_start();
        let lhs = self.parse_ternary()?;
        let op = match self.peek().map(|t| &t.tok) {
            Some(Tok::Punct("=")) => Some(AssignOp::Set),
            Some(Tok::Punct("+=")) => Some(AssignOp::Add),
            Some(Tok::Punct("-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>=" | ">>>=")) => {
                Some(AssignOp::Other)
            }
            _ => None,
        };
        let Some(op) = op else {
            return Ok(lhs);
        };
        self.bump();
        let value = self.parse_expr()?;
        Ok(Expr::new(
            ExprKind::Assign {
                target: Box::new(lhs),
                op,
                value: Box::new(value),
            },
            Span::new(start, self.prev_end),
        ))
    }

    fn at_lambda(&self) -> bool {
        match self.peek() {
            Some(t) if t.ident().is_some() => self.peek_at(1).is_some_and(|t| t.is_punct("->")),
            Some(t) if t.is_punct("(") => match self.matching(self.pos) {
                Some(close) => self.toks.get(close + 1).is_some_and(|t| t.is_punct("->")) && close + 1 < self.end,
                None => false,
            },
            _ => false,
        }
    }

    fn parse_lambda(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        if self.is_punct("(") {
            self.skip_group()?;
        } else {
            self.bump();
        }
        self.expect_punct("->")?;
        let body = if self.is_punct("{") {
            self.parse_block_body()?
        } else {
            let s = self.cur_start();
            let e = self.parse_expr()?;
            vec![Stmt {
                span: Span::new(s, self.prev_end),
                kind: StmtKind::Expr(e),
            }]
        };
        Ok(Expr::new(ExprKind::Lambda(body), Span::new(start, self.prev_end)))
    }

    fn parse_ternary(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let cond = self.parse_binary(1)?;
        if !self.eat_punct("?") {
            return Ok(cond);
        }
        self.parse_expr()?;
        self.expect_punct(":")?;
        if self.at_lambda() {
            self.parse_lambda()?;
        } else {
            self.parse_ternary()?;
        }
        let span = Span::new(start, self.prev_end);
        Ok(Expr::new(ExprKind::Unknown(self.raw(span)), span))
    }

    fn binary_prec(&self) -> Option<(&'static str, u8)> {
        let t = self.peek()?;
        let op: &'static str = match &t.tok {
            Tok::Punct(p) => p,
            Tok::Ident(s) if s == "instanceof" => "instanceof",
            _ => return None,
        };
        let prec = match op {
            "||" => 1,
            "&&" => 2,
            "|" => 3,
            "^" => 4,
            "&" => 5,
            "==" | "!=" => 6,
            "<" | ">" | "<=" | ">=" | "instanceof" => 7,
            "<<" | ">>" | ">>>" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        };
        Some((op, prec))
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut left = self.parse_unary()?;
        while let Some((op, prec)) = self.binary_prec() {
            if prec < min_prec {
                break;
            }
            self.bump();
            let right = if op == "instanceof" {
                let s = self.cur_start();
                self.eat_ident("final");
                let ty = self.parse_type()?;
                // Pattern binding.
                if self.peek().and_then(Token::ident).is_some() {
                    self.bump();
                }
                Expr::new(ExprKind::NameRef(ty), Span::new(s, self.prev_end))
            } else {
                self.parse_binary(prec + 1)?
            };
            let span = left.span.to(right.span);
            left = Expr::new(
                ExprKind::Binary {
                    op: op.to_string(),
                    left: Box::new(left),
                    right: Box::new(right),
                },
                span,
            );
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let Some(t) = self.peek() else {
            return Err(self.error_here("unexpected end of expression"));
        };
        match &t.tok {
            Tok::Punct("-") => {
                self.bump();
                let inner = self.parse_unary()?;
                if let ExprKind::NumberLiteral { text, is_int } = &inner.kind {
                    return Ok(Expr::new(
                        ExprKind::NumberLiteral {
                            text: format!("-{text}"),
                            is_int: *is_int,
                        },
                        Span::new(start, self.prev_end),
                    ));
                }
                let span = Span::new(start, self.prev_end);
                Ok(Expr::new(
                    ExprKind::Binary {
                        op: "-".into(),
                        left: Box::new(Expr::new(
                            ExprKind::NumberLiteral {
                                text: "0".into(),
                                is_int: true,
                            },
                            Span::new(start, start),
                        )),
                        right: Box::new(inner),
                    },
                    span,
                ))
            }
            Tok::Punct("+") => {
                self.bump();
                self.parse_unary()
            }
            Tok::Punct("!" | "~" | "++" | "--") => {
                self.bump();
                self.parse_unary()?;
                let span = Span::new(start, self.prev_end);
                Ok(Expr::new(ExprKind::Unknown(self.raw(span)), span))
            }
            Tok::Punct("(") if self.at_cast() => {
                self.bump();
                self.parse_type()?;
                while self.eat_punct("&") {
                    self.parse_type()?;
                }
                self.expect_punct(")")?;
                let mut inner = if self.at_lambda() {
                    self.parse_lambda()?
                } else {
                    self.parse_unary()?
                };
                inner.span = Span::new(start, inner.span.end);
                Ok(inner)
            }
            _ => self.parse_postfix(),
        }
    }

    fn at_cast(&self) -> bool {
        let Some(close) = self.matching(self.pos) else {
            return false;
        };
        // Contents must look like a type.
        let mut probe = self.sub(self.pos + 1, close);
        if probe.parse_type().is_err() {
            return false;
        }
        while probe.eat_punct("&") {
            if probe.parse_type().is_err() {
                return false;
            }
        }
        if !probe.at_end() {
            return false;
        }
        let inner_first = &self.toks[self.pos + 1];
        let primitive = inner_first.ident().is_some_and(|s| {
            matches!(
                s,
                "int" | "long" | "short" | "byte" | "char" | "float" | "double" | "boolean"
            )
        });
        let Some(next) = self.toks.get(close + 1).filter(|_| close + 1 < self.end) else {
            return false;
        };
        match &next.tok {
            Tok::Ident(s) => !matches!(s.as_str(), "instanceof"),
            Tok::Str(_) | Tok::Char(_) | Tok::Int(_) | Tok::Float(_) => true,
            Tok::Punct("(" | "!" | "~") => true,
            Tok::Punct("+" | "-" | "++" | "--") => primitive,
            _ => false,
        }
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let mut e = self.parse_primary()?;
        loop {
            if self.is_punct(".") {
                self.bump();
                if self.is_punct("<") {
                    self.skip_angles()?;
                }
                if self.is_ident("new") {
                    let mut inner = self.parse_new()?;
                    inner.span = Span::new(start, self.prev_end);
                    e = inner;
                    continue;
                }
                let name = self.expect_ident()?;
                if self.is_punct("(") {
                    let args = self.parse_args()?;
                    e = Expr::new(
                        ExprKind::MethodCall {
                            receiver: Some(Box::new(e)),
                            name,
                            args,
                        },
                        Span::new(start, self.prev_end),
                    );
                } else {
                    e = Expr::new(
                        ExprKind::FieldAccess {
                            receiver: Box::new(e),
                            name,
                        },
                        Span::new(start, self.prev_end),
                    );
                }
            } else if self.is_punct("[") {
                self.skip_group()?;
                let span = Span::new(start, self.prev_end);
                e = Expr::new(ExprKind::Unknown(self.raw(span)), span);
            } else if self.is_punct("++") || self.is_punct("--") {
                self.bump();
                let span = Span::new(start, self.prev_end);
                e = Expr::new(ExprKind::Unknown(self.raw(span)), span);
            } else if self.is_punct("::") {
                self.bump();
                if !self.eat_ident("new") {
                    self.expect_ident()?;
                }
                let span = Span::new(start, self.prev_end);
                e = Expr::new(ExprKind::Unknown(self.raw(span)), span);
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        while !self.is_punct(")") {
            if self.at_end() {
                return Err(self.error_here("unterminated argument list"));
            }
            args.push(self.parse_expr()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn parse_new(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        self.bump(); // new
        if self.is_punct("<") {
            self.skip_angles()?;
        }
        while self.is_annotation_start() {
            self.parse_annotation()?;
        }
        let mut type_name = self.expect_ident()?;
        loop {
            if self.is_punct("<") {
                self.skip_angles()?;
            }
            if self.is_punct(".") && self.peek_at(1).and_then(Token::ident).is_some() {
                self.bump();
                type_name.push('.');
                type_name.push_str(&self.expect_ident()?);
            } else {
                break;
            }
        }
        if self.is_punct("[") {
            while self.is_punct("[") {
                self.skip_group()?;
            }
            if self.is_punct("{") {
                let init = self.parse_primary()?;
                let mut init = init;
                init.span = Span::new(start, self.prev_end);
                return Ok(init);
            }
            let span = Span::new(start, self.prev_end);
            return Ok(Expr::new(ExprKind::Unknown(self.raw(span)), span));
        }
        let args = self.parse_args()?;
        let body = if self.is_punct("{") {
            let open = self.pos;
            let Some(close) = self.matching(open) else {
                return Err(self.error_here("unclosed anonymous class body"));
            };
            let simple = type_name.rsplit('.').next().unwrap_or(&type_name).to_string();
            let mut inner = self.sub(open + 1, close);
            let (fields, methods, _) = inner.parse_class_body(&simple, TypeKind::Class);
            self.errors.append(&mut inner.errors);
            self.pos = close;
            self.bump();
            Some(Box::new(TypeDecl {
                name: simple,
                kind: TypeKind::Class,
                outer: None,
                annotations: Vec::new(),
                fields,
                methods,
                span: Span::new(self.toks[open].span.start, self.prev_end),
            }))
        } else {
            None
        };
        Ok(Expr::new(
            ExprKind::New { type_name, args, body },
            Span::new(start, self.prev_end),
        ))
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let start = self.cur_start();
        let Some(t) = self.peek() else {
            return Err(self.error_here("unexpected end of expression"));
        };
        let kind = match &t.tok {
            Tok::Str(s) | Tok::Char(s) => {
                let s = s.clone();
                self.bump();
                ExprKind::StringLiteral(s)
            }
            Tok::Int(n) => {
                let n = n.clone();
                self.bump();
                ExprKind::NumberLiteral { text: n, is_int: true }
            }
            Tok::Float(n) => {
                let n = n.clone();
                self.bump();
                ExprKind::NumberLiteral { text: n, is_int: false }
            }
            Tok::Punct("(") => {
                self.bump();
                let mut e = self.parse_expr()?;
                self.expect_punct(")")?;
                e.span = Span::new(start, self.prev_end);
                return Ok(e);
            }
            Tok::Punct("{") => {
                self.bump();
                let mut items = Vec::new();
                while !self.is_punct("}") {
                    if self.at_end() {
                        return Err(self.error_here("unterminated array initializer"));
                    }
                    items.push(self.parse_expr()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("}")?;
                ExprKind::ArrayInit(items)
            }
            Tok::At => {
                self.parse_annotation()?;
                let span = Span::new(start, self.prev_end);
                return Ok(Expr::new(ExprKind::Unknown(self.raw(span)), span));
            }
            Tok::Ident(id) => match id.as_str() {
                "true" | "false" => {
                    let v = id == "true";
                    self.bump();
                    ExprKind::BoolLiteral(v)
                }
                "null" => {
                    self.bump();
                    ExprKind::NullLiteral
                }
                "new" => return self.parse_new(),
                "switch" => {
                    self.bump();
                    self.parse_paren_expr()?;
                    if self.is_punct("{") {
                        self.skip_group()?;
                    }
                    let span = Span::new(start, self.prev_end);
                    return Ok(Expr::new(ExprKind::Unknown(self.raw(span)), span));
                }
                _ => {
                    let id = id.clone();
                    self.bump();
                    if self.is_punct("(") {
                        let args = self.parse_args()?;
                        ExprKind::MethodCall {
                            receiver: None,
                            name: id,
                            args,
                        }
                    } else if self.is_punct("[") && self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
                        // `String[].class`
                        while self.is_punct("[") && self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
                            self.bump();
                            self.bump();
                        }
                        ExprKind::NameRef(format!("{id}[]"))
                    } else {
                        ExprKind::NameRef(id)
                    }
                }
            },
            _ => return Err(self.error_here("unexpected token in expression")),
        };
        Ok(Expr::new(kind, Span::new(start, self.prev_end)))
    }
}

enum Member {
    Fields(Vec<FieldDecl>),
    Method(MethodDecl),
    Types(Vec<TypeDecl>),
}

// ---- `+` typing pass ----

#[derive(Clone, Copy, PartialEq, Eq)]
enum Typing {
    Str,
    NonStr,
    Unknown,
}

const STRING_METHODS: &[&str] = &[
    "toString",
    "concat",
    "format",
    "valueOf",
    "trim",
    "substring",
    "replace",
    "replaceAll",
    "toLowerCase",
    "toUpperCase",
    "getString",
    "name",
    "join",
    "encode",
    "toJson",
];
const NON_STRING_METHODS: &[&str] = &[
    "length",
    "size",
    "indexOf",
    "lastIndexOf",
    "hashCode",
    "intValue",
    "longValue",
    "getResponseCode",
    "ordinal",
    "compareTo",
    "currentTimeMillis",
    "nanoTime",
    "equals",
    "isEmpty",
    "contains",
    "startsWith",
    "endsWith",
];

struct TypeEnv<'a> {
    locals: &'a HashMap<String, DeclaredType>,
    fields: &'a HashMap<String, DeclaredType>,
}

impl TypeEnv<'_> {
    fn lookup(&self, name: &str) -> Option<&DeclaredType> {
        self.locals.get(name).or_else(|| self.fields.get(name))
    }

    fn typing(&self, e: &Expr) -> Typing {
        match &e.kind {
            ExprKind::StringLiteral(_) | ExprKind::Concat(..) => Typing::Str,
            ExprKind::NumberLiteral { .. } | ExprKind::BoolLiteral(_) | ExprKind::Binary { .. } => Typing::NonStr,
            ExprKind::NameRef(n) => self.decl_typing(self.lookup(n)),
            ExprKind::FieldAccess { receiver, name } if matches!(&receiver.kind, ExprKind::NameRef(r) if r == "this") => {
                self.decl_typing(self.fields.get(name))
            }
            ExprKind::MethodCall { name, .. } => {
                if STRING_METHODS.contains(&name.as_str()) {
                    Typing::Str
                } else if NON_STRING_METHODS.contains(&name.as_str()) {
                    Typing::NonStr
                } else {
                    Typing::Unknown
                }
            }
            ExprKind::New { type_name, .. } => match type_name.as_str() {
                "String" => Typing::Str,
                _ => Typing::Unknown,
            },
            _ => Typing::Unknown,
        }
    }

    fn decl_typing(&self, t: Option<&DeclaredType>) -> Typing {
        match t {
            Some(DeclaredType::String) => Typing::Str,
            Some(DeclaredType::NumberInt | DeclaredType::NumberFloat | DeclaredType::Boolean) => Typing::NonStr,
            _ => Typing::Unknown,
        }
    }
}

/// Rewrites `Binary("+")` into `Concat` where an operand is string typed,
/// or where neither operand's type is known. Types come from declarations
/// visible in the enclosing method and type.
fn retype_plus_in_type(ty: &mut TypeDecl) {
    let fields: HashMap<String, DeclaredType> = ty
        .fields
        .iter()
        .map(|f| (f.name.clone(), f.declared_type.clone()))
        .collect();
    let empty = HashMap::new();
    for f in &mut ty.fields {
        if let Some(init) = &mut f.initializer {
            retype_expr(
                init,
                &TypeEnv {
                    locals: &empty,
                    fields: &fields,
                },
            );
        }
    }
    for m in &mut ty.methods {
        let mut locals: HashMap<String, DeclaredType> = m
            .params
            .iter()
            .map(|p| (p.name.clone(), p.declared_type.clone()))
            .collect();
        if let Some(body) = &m.body {
            for s in body {
                collect_local_types(s, &mut locals);
            }
        }
        if let Some(body) = &mut m.body {
            let env = TypeEnv {
                locals: &locals,
                fields: &fields,
            };
            for s in body {
                retype_stmt(s, &env);
            }
        }
    }
}

fn collect_local_types(s: &Stmt, out: &mut HashMap<String, DeclaredType>) {
    s.walk_stmts(&mut |st| {
        if let StmtKind::LocalDecl {
            name, declared_type, ..
        } = &st.kind
        {
            out.entry(name.clone()).or_insert_with(|| declared_type.clone());
        }
    });
    s.walk_exprs(&mut |e| {
        if let ExprKind::Lambda(stmts) = &e.kind {
            for st in stmts {
                st.walk_stmts(&mut |st| {
                    if let StmtKind::LocalDecl {
                        name, declared_type, ..
                    } = &st.kind
                    {
                        out.entry(name.clone()).or_insert_with(|| declared_type.clone());
                    }
                });
            }
        }
    });
}

fn retype_stmt(s: &mut Stmt, env: &TypeEnv) {
    match &mut s.kind {
        StmtKind::LocalDecl { init: Some(e), .. } | StmtKind::Expr(e) | StmtKind::Return(Some(e)) => {
            retype_expr(e, env)
        }
        StmtKind::Assign { target, value, .. } => {
            retype_expr(target, env);
            retype_expr(value, env);
        }
        StmtKind::Control { exprs, body } => {
            for e in exprs {
                retype_expr(e, env);
            }
            for st in body {
                retype_stmt(st, env);
            }
        }
        StmtKind::Block(body) => {
            for st in body {
                retype_stmt(st, env);
            }
        }
        _ => {}
    }
}

fn retype_expr(e: &mut Expr, env: &TypeEnv) {
    match &mut e.kind {
        ExprKind::Concat(l, r) => {
            retype_expr(l, env);
            retype_expr(r, env);
        }
        ExprKind::Binary { left, right, .. } => {
            retype_expr(left, env);
            retype_expr(right, env);
        }
        ExprKind::Assign { target, value, .. } => {
            retype_expr(target, env);
            retype_expr(value, env);
        }
        ExprKind::MethodCall { receiver, args, .. } => {
            if let Some(r) = receiver {
                retype_expr(r, env);
            }
            for a in args {
                retype_expr(a, env);
            }
        }
        ExprKind::New { args, body, .. } => {
            for a in args {
                retype_expr(a, env);
            }
            if let Some(body) = body {
                retype_plus_in_type(body);
            }
        }
        ExprKind::FieldAccess { receiver, .. } => retype_expr(receiver, env),
        ExprKind::ArrayInit(items) => {
            for i in items {
                retype_expr(i, env);
            }
        }
        ExprKind::Lambda(stmts) => {
            for s in stmts {
                retype_stmt(s, env);
            }
        }
        _ => {}
    }
    let is_concat = match &e.kind {
        ExprKind::Binary { op, left, right } if op == "+" => {
            let (l, r) = (env.typing(left), env.typing(right));
            l == Typing::Str || r == Typing::Str || (l == Typing::Unknown && r == Typing::Unknown)
        }
        _ => false,
    };
    if is_concat {
        let kind = std::mem::replace(&mut e.kind, ExprKind::NullLiteral);
        if let ExprKind::Binary { left, right, .. } = kind {
            e.kind = ExprKind::Concat(left, right);
        }
    }
}
