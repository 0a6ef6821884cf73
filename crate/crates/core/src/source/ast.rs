use std::path::PathBuf;

use serde::Serialize;

/// Byte range into the original source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos < self.end
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    /// Dotted name without the trailing `.*` for wildcard imports.
    pub path: String,
    pub is_static: bool,
    pub wildcard: bool,
    pub span: Span,
}

/// One parsed source file.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub path: PathBuf,
    pub package: Option<String>,
    pub imports: Vec<Import>,
    /// All type declarations of the file, nested ones flattened after their
    /// enclosing type (see [`TypeDecl::outer`]).
    pub types: Vec<TypeDecl>,
    pub parse_errors: Vec<ParseError>,
    /// Length of the text in bytes.
    pub len: usize,
}

impl SourceUnit {
    pub fn type_named(&self, name: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Annotation,
    Record,
}

#[derive(Debug, Clone)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeKind,
    pub outer: Option<String>,
    pub annotations: Vec<Annotation>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl TypeDecl {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }
}

/// Coarse value type taken from the declaration token only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum DeclaredType {
    String,
    NumberInt,
    NumberFloat,
    Boolean,
    Object(String),
    Unknown,
}

impl DeclaredType {
    /// Classifies an erased type name as written in source.
    pub fn from_type_name(name: &str) -> Self {
        let simple = name.rsplit('.').next().unwrap_or(name);
        if simple.ends_with("[]") {
            return DeclaredType::Object(simple.to_string());
        }
        match simple {
            "String" | "CharSequence" => DeclaredType::String,
            "int" | "long" | "short" | "byte" | "Integer" | "Long" | "Short" | "Byte" | "BigInteger"
            | "AtomicInteger" | "AtomicLong" => DeclaredType::NumberInt,
            "float" | "double" | "Float" | "Double" | "BigDecimal" | "Number" => DeclaredType::NumberFloat,
            "boolean" | "Boolean" => DeclaredType::Boolean,
            "" | "var" | "val" => DeclaredType::Unknown,
            _ => DeclaredType::Object(simple.to_string()),
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, DeclaredType::NumberInt | DeclaredType::NumberFloat)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub is_static: bool,
    pub is_final: bool,
    pub is_transient: bool,
}

#[derive(Debug, Clone)]
pub struct Annotation {
    /// Name as written, e.g. `GET` or `retrofit2.http.GET`.
    pub name: String,
    pub args: Vec<AnnotationArg>,
    pub span: Span,
}

impl Annotation {
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    /// The unnamed argument or the one named `value`.
    pub fn value(&self) -> Option<&Expr> {
        self.arg("value")
    }

    pub fn arg(&self, name: &str) -> Option<&Expr> {
        self.args
            .iter()
            .find(|a| a.name.as_deref() == Some(name))
            .or_else(|| {
                if name == "value" {
                    self.args.iter().find(|a| a.name.is_none())
                } else {
                    None
                }
            })
            .map(|a| &a.value)
    }
}

#[derive(Debug, Clone)]
pub struct AnnotationArg {
    pub name: Option<String>,
    pub value: Expr,
}

#[derive(Debug, Clone)]
pub struct FieldDecl {
    pub name: String,
    pub type_name: String,
    pub declared_type: DeclaredType,
    pub modifiers: Modifiers,
    pub annotations: Vec<Annotation>,
    pub initializer: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub type_name: String,
    pub declared_type: DeclaredType,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub name: String,
    pub return_type: String,
    pub params: Vec<Param>,
    pub annotations: Vec<Annotation>,
    /// `None` for abstract and interface methods.
    pub body: Option<Vec<Stmt>>,
    pub is_constructor: bool,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Other,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    LocalDecl {
        name: String,
        type_name: String,
        declared_type: DeclaredType,
        init: Option<Expr>,
    },
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
    Expr(Expr),
    Return(Option<Expr>),
    /// Control-flow construct flattened: its header expressions and the
    /// statements of all its branches. The analysis is not path sensitive.
    Control {
        exprs: Vec<Expr>,
        body: Vec<Stmt>,
    },
    Block(Vec<Stmt>),
    /// Local class declaration or anything else that is skipped.
    Other,
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    StringLiteral(String),
    NumberLiteral {
        text: String,
        is_int: bool,
    },
    BoolLiteral(bool),
    NullLiteral,
    NameRef(String),
    /// `+` with at least one string-typed operand.
    Concat(Box<Expr>, Box<Expr>),
    MethodCall {
        receiver: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        type_name: String,
        args: Vec<Expr>,
        /// Anonymous class body, if any.
        body: Option<Box<TypeDecl>>,
    },
    FieldAccess {
        receiver: Box<Expr>,
        name: String,
    },
    /// Any other binary operator, or `+` on provably non-string operands.
    Binary {
        op: String,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    /// Assignment used as an expression, e.g. `while ((line = r.readLine()) != null)`.
    Assign {
        target: Box<Expr>,
        op: AssignOp,
        value: Box<Expr>,
    },
    /// `{a, b}` in annotation values and array initializers.
    ArrayInit(Vec<Expr>),
    Lambda(Vec<Stmt>),
    Unknown(String),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn as_str_literal(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::StringLiteral(s) => Some(s),
            _ => None,
        }
    }

    /// Dotted name for `a`, `a.b.c` chains of names.
    pub fn qualified_name(&self) -> Option<String> {
        match &self.kind {
            ExprKind::NameRef(n) => Some(n.clone()),
            ExprKind::FieldAccess { receiver, name } => receiver.qualified_name().map(|q| format!("{q}.{name}")),
            _ => None,
        }
    }

    /// Innermost receiver of a call/field chain.
    pub fn chain_root(&self) -> &Expr {
        match &self.kind {
            ExprKind::MethodCall { receiver: Some(r), .. } => r.chain_root(),
            ExprKind::FieldAccess { receiver, .. } => receiver.chain_root(),
            _ => self,
        }
    }

    /// Calls of a receiver chain, innermost first. `a.b(x).c(y)` yields `[b, c]`.
    pub fn call_chain(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut cur = self;
        while let ExprKind::MethodCall { receiver, .. } = &cur.kind {
            out.push(cur);
            match receiver {
                Some(r) => cur = r,
                None => break,
            }
        }
        out.reverse();
        out
    }

    /// Visits this expression and every sub-expression, pre-order. Anonymous
    /// class bodies and lambda bodies are included.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Concat(l, r) | ExprKind::Binary { left: l, right: r, .. } => {
                l.walk(f);
                r.walk(f);
            }
            ExprKind::Assign { target, value, .. } => {
                target.walk(f);
                value.walk(f);
            }
            ExprKind::MethodCall { receiver, args, .. } => {
                if let Some(r) = receiver {
                    r.walk(f);
                }
                for a in args {
                    a.walk(f);
                }
            }
            ExprKind::New { args, body, .. } => {
                for a in args {
                    a.walk(f);
                }
                if let Some(body) = body {
                    for field in &body.fields {
                        if let Some(init) = &field.initializer {
                            init.walk(f);
                        }
                    }
                    for m in &body.methods {
                        if let Some(stmts) = &m.body {
                            for s in stmts {
                                s.walk_exprs(f);
                            }
                        }
                    }
                }
            }
            ExprKind::FieldAccess { receiver, .. } => receiver.walk(f),
            ExprKind::ArrayInit(items) => {
                for i in items {
                    i.walk(f);
                }
            }
            ExprKind::Lambda(stmts) => {
                for s in stmts {
                    s.walk_exprs(f);
                }
            }
            ExprKind::StringLiteral(_)
            | ExprKind::NumberLiteral { .. }
            | ExprKind::BoolLiteral(_)
            | ExprKind::NullLiteral
            | ExprKind::NameRef(_)
            | ExprKind::Unknown(_) => {}
        }
    }
}

impl Stmt {
    /// Visits every expression reachable from this statement.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        match &self.kind {
            StmtKind::LocalDecl { init, .. } => {
                if let Some(e) = init {
                    e.walk(f);
                }
            }
            StmtKind::Assign { target, value, .. } => {
                target.walk(f);
                value.walk(f);
            }
            StmtKind::Expr(e) => e.walk(f),
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    e.walk(f);
                }
            }
            StmtKind::Control { exprs, body } => {
                for e in exprs {
                    e.walk(f);
                }
                for s in body {
                    s.walk_exprs(f);
                }
            }
            StmtKind::Block(stmts) => {
                for s in stmts {
                    s.walk_exprs(f);
                }
            }
            StmtKind::Other => {}
        }
    }

    /// Visits this statement and all nested statements, pre-order.
    pub fn walk_stmts<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::Control { body, .. } | StmtKind::Block(body) => {
                for s in body {
                    s.walk_stmts(f);
                }
            }
            _ => {}
        }
    }
}

impl Expr {
    /// Like [`Expr::walk`] but does not enter lambda bodies or anonymous
    /// class bodies.
    pub fn walk_shallow<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Concat(l, r) | ExprKind::Binary { left: l, right: r, .. } => {
                l.walk_shallow(f);
                r.walk_shallow(f);
            }
            ExprKind::Assign { target, value, .. } => {
                target.walk_shallow(f);
                value.walk_shallow(f);
            }
            ExprKind::MethodCall { receiver, args, .. } => {
                if let Some(r) = receiver {
                    r.walk_shallow(f);
                }
                for a in args {
                    a.walk_shallow(f);
                }
            }
            ExprKind::New { args, .. } => {
                for a in args {
                    a.walk_shallow(f);
                }
            }
            ExprKind::FieldAccess { receiver, .. } => receiver.walk_shallow(f),
            ExprKind::ArrayInit(items) => {
                for i in items {
                    i.walk_shallow(f);
                }
            }
            _ => {}
        }
    }
}

impl Stmt {
    /// Expressions belonging to this statement itself, excluding nested
    /// statements.
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::LocalDecl { init, .. } => init.iter().collect(),
            StmtKind::Assign { target, value, .. } => vec![target, value],
            StmtKind::Expr(e) => vec![e],
            StmtKind::Return(e) => e.iter().collect(),
            StmtKind::Control { exprs, .. } => exprs.iter().collect(),
            StmtKind::Block(_) | StmtKind::Other => Vec::new(),
        }
    }
}

/// Visits every statement, including those inside lambda bodies and the
/// methods of anonymous classes, in source order.
pub fn visit_stmts_deep<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        let mut nested: Vec<&'a [Stmt]> = Vec::new();
        for e in s.own_exprs() {
            e.walk_shallow(&mut |x| match &x.kind {
                ExprKind::Lambda(body) => nested.push(body),
                ExprKind::New { body: Some(td), .. } => {
                    for m in &td.methods {
                        if let Some(b) = &m.body {
                            nested.push(b);
                        }
                    }
                }
                _ => {}
            });
        }
        if let StmtKind::Control { body, .. } | StmtKind::Block(body) = &s.kind {
            nested.push(body);
        }
        for n in nested {
            visit_stmts_deep(n, f);
        }
    }
}
