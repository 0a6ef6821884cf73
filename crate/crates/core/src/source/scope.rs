use std::collections::BTreeMap;

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Field,
    Param,
    Local,
}

#[derive(Debug, Clone)]
pub struct Assignment {
    pub value: Expr,
    pub op: AssignOp,
    /// Byte offset of the assigning statement.
    pub pos: usize,
}

/// A statement-level method call whose receiver chain starts at the
/// variable, e.g. `sb.append(x);` or `builder.addHeader(k, v);`.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub call: Expr,
    pub pos: usize,
}

#[derive(Debug, Clone)]
pub struct Declaration {
    pub name: String,
    pub type_name: String,
    pub declared_type: DeclaredType,
    pub kind: DeclKind,
    pub span: Span,
    /// Ordered by source position. A field initializer is the first entry.
    pub assignments: Vec<Assignment>,
    pub invocations: Vec<Invocation>,
}

/// Chain of name → declaration maps, innermost first.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    frames: Vec<BTreeMap<String, Declaration>>,
    type_name: String,
    method_span: Option<Span>,
}

impl Scope {
    pub fn lookup(&self, name: &str) -> Option<&Declaration> {
        self.frames.iter().find_map(|f| f.get(name))
    }

    /// Resolves `this.name` or `Type.name` style accesses, skipping locals.
    pub fn lookup_field(&self, name: &str) -> Option<&Declaration> {
        self.frames
            .iter()
            .rev()
            .find_map(|f| f.get(name).filter(|d| d.kind == DeclKind::Field))
    }

    pub fn type_name(&self) -> &str {
        &self.type_name
    }

    pub fn method_span(&self) -> Option<Span> {
        self.method_span
    }

    pub fn declarations(&self) -> impl Iterator<Item = &Declaration> {
        self.frames.iter().flat_map(|f| f.values())
    }

    /// Picks the assignment that reaches a use at `pos`: the last one before
    /// `pos` inside the current method, otherwise the last one made outside
    /// it (initializers, other methods) before `pos`, otherwise the last one
    /// made outside it at all.
    pub fn reaching_assignment<'a>(&self, decl: &'a Declaration, pos: usize) -> Option<&'a Assignment> {
        let in_method = |a: &Assignment| self.method_span.is_some_and(|s| s.contains(a.pos));
        let use_in_method = self.method_span.is_some_and(|s| s.contains(pos));
        if use_in_method {
            if let Some(a) = decl.assignments.iter().rev().find(|a| in_method(a) && a.pos < pos) {
                return Some(a);
            }
        }
        if decl.kind != DeclKind::Field {
            return None;
        }
        let outside = || decl.assignments.iter().rev().filter(|a| !in_method(a));
        outside().find(|a| a.pos < pos).or_else(|| outside().next())
    }

    /// Invocations on the variable strictly between two positions.
    pub fn invocations_between<'a>(
        &self,
        decl: &'a Declaration,
        after: usize,
        before: usize,
    ) -> impl Iterator<Item = &'a Invocation> {
        decl.invocations.iter().filter(move |i| i.pos > after && i.pos < before)
    }
}

/// Builds the scope for a method body: locals and parameters over the
/// enclosing type's fields.
pub fn build_scope(method: &MethodDecl, enclosing: &TypeDecl) -> Scope {
    let mut locals: BTreeMap<String, Declaration> = BTreeMap::new();
    for p in &method.params {
        locals.insert(
            p.name.clone(),
            Declaration {
                name: p.name.clone(),
                type_name: p.type_name.clone(),
                declared_type: p.declared_type.clone(),
                kind: DeclKind::Param,
                span: p.span,
                assignments: Vec::new(),
                invocations: Vec::new(),
            },
        );
    }
    let body = method.body.as_deref().unwrap_or(&[]);
    collect_locals(body, &mut locals);
    record_uses(body, &mut locals);

    let fields = field_frame(enclosing);
    Scope {
        frames: vec![locals, fields],
        type_name: enclosing.name.clone(),
        method_span: Some(method.span),
    }
}

/// Scope for field initializers: fields only.
pub fn build_type_scope(enclosing: &TypeDecl) -> Scope {
    Scope {
        frames: vec![field_frame(enclosing)],
        type_name: enclosing.name.clone(),
        method_span: None,
    }
}

fn collect_locals(body: &[Stmt], locals: &mut BTreeMap<String, Declaration>) {
    visit_stmts_deep(body, &mut |s| {
        if let StmtKind::LocalDecl {
            name,
            type_name,
            declared_type,
            ..
        } = &s.kind
        {
            locals.entry(name.clone()).or_insert_with(|| Declaration {
                name: name.clone(),
                type_name: type_name.clone(),
                declared_type: declared_type.clone(),
                kind: DeclKind::Local,
                span: s.span,
                assignments: Vec::new(),
                invocations: Vec::new(),
            });
        }
    });
    // Parameters of lambdas are not modeled; anonymous class method
    // parameters are.
    for s in body {
        for e in s.own_exprs() {
            e.walk(&mut |x| {
                if let ExprKind::New { body: Some(td), .. } = &x.kind {
                    for m in &td.methods {
                        for p in &m.params {
                            locals.entry(p.name.clone()).or_insert_with(|| Declaration {
                                name: p.name.clone(),
                                type_name: p.type_name.clone(),
                                declared_type: p.declared_type.clone(),
                                kind: DeclKind::Param,
                                span: p.span,
                                assignments: Vec::new(),
                                invocations: Vec::new(),
                            });
                        }
                    }
                }
            });
        }
    }
}

/// Name assigned by an assignment target: `x` or `this.x`.
fn target_name(target: &Expr) -> Option<(&str, bool)> {
    match &target.kind {
        ExprKind::NameRef(n) => Some((n, false)),
        ExprKind::FieldAccess { receiver, name } if matches!(&receiver.kind, ExprKind::NameRef(r) if r == "this") => {
            Some((name, true))
        }
        _ => None,
    }
}

/// Records assignments and invocations on locals and parameters.
fn record_uses(body: &[Stmt], decls: &mut BTreeMap<String, Declaration>) {
    let local_target = |e: &Expr| match target_name(e) {
        Some((n, false)) => Some(n.to_string()),
        _ => None,
    };
    visit_stmts_deep(body, &mut |s| {
        match &s.kind {
            StmtKind::LocalDecl {
                name, init: Some(init), ..
            } => {
                if let Some(d) = decls.get_mut(name) {
                    if d.kind == DeclKind::Local {
                        d.assignments.push(Assignment {
                            value: init.clone(),
                            op: AssignOp::Set,
                            pos: s.span.start,
                        });
                    }
                }
            }
            StmtKind::Assign { target, op, value } => {
                if let Some(d) = local_target(target).and_then(|n| decls.get_mut(&n)) {
                    d.assignments.push(Assignment {
                        value: value.clone(),
                        op: *op,
                        pos: s.span.start,
                    });
                }
            }
            StmtKind::Expr(e) if matches!(e.kind, ExprKind::MethodCall { .. }) => {
                if let Some(d) = local_target(e.chain_root()).and_then(|n| decls.get_mut(&n)) {
                    d.invocations.push(Invocation {
                        call: e.clone(),
                        pos: s.span.start,
                    });
                }
            }
            _ => {}
        }
        // Assignments nested in expressions.
        for e in s.own_exprs() {
            e.walk_shallow(&mut |x| {
                if let ExprKind::Assign { target, op, value } = &x.kind {
                    if let Some(d) = local_target(target).and_then(|n| decls.get_mut(&n)) {
                        d.assignments.push(Assignment {
                            value: (**value).clone(),
                            op: *op,
                            pos: x.span.start,
                        });
                    }
                }
            });
        }
    });
    for d in decls.values_mut() {
        d.assignments.sort_by_key(|a| a.pos);
        d.invocations.sort_by_key(|i| i.pos);
    }
}

fn field_frame(ty: &TypeDecl) -> BTreeMap<String, Declaration> {
    let mut fields: BTreeMap<String, Declaration> = BTreeMap::new();
    for f in &ty.fields {
        let mut assignments = Vec::new();
        if let Some(init) = &f.initializer {
            assignments.push(Assignment {
                value: init.clone(),
                op: AssignOp::Set,
                pos: f.span.start,
            });
        }
        fields.entry(f.name.clone()).or_insert(Declaration {
            name: f.name.clone(),
            type_name: f.type_name.clone(),
            declared_type: f.declared_type.clone(),
            kind: DeclKind::Field,
            span: f.span,
            assignments,
            invocations: Vec::new(),
        });
    }
    // Assignments to fields from any method, unless shadowed there.
    for m in &ty.methods {
        let Some(body) = &m.body else { continue };
        let mut shadowed: BTreeMap<String, Declaration> = BTreeMap::new();
        collect_locals(body, &mut shadowed);
        let param_names: Vec<&str> = m.params.iter().map(|p| p.name.as_str()).collect();
        let is_shadowed = |n: &str| shadowed.contains_key(n) || param_names.contains(&n);
        let mut scratch = std::mem::take(&mut fields);
        record_field_uses(body, &mut scratch, &is_shadowed);
        fields = scratch;
    }
    for d in fields.values_mut() {
        d.assignments.sort_by_key(|a| a.pos);
        d.invocations.sort_by_key(|i| i.pos);
    }
    fields
}

fn record_field_uses(body: &[Stmt], fields: &mut BTreeMap<String, Declaration>, is_shadowed: &dyn Fn(&str) -> bool) {
    // `this.x` always refers to the field; a bare `x` only when unshadowed.
    visit_stmts_deep(body, &mut |s| {
        let mut push_assign = |target: &Expr, op: AssignOp, value: &Expr, pos: usize| {
            if let Some((n, is_this)) = target_name(target) {
                if is_this || !is_shadowed(n) {
                    if let Some(d) = fields.get_mut(n) {
                        d.assignments.push(Assignment {
                            value: value.clone(),
                            op,
                            pos,
                        });
                    }
                }
            }
        };
        if let StmtKind::Assign { target, op, value } = &s.kind {
            push_assign(target, *op, value, s.span.start);
        }
        for e in s.own_exprs() {
            e.walk_shallow(&mut |x| {
                if let ExprKind::Assign { target, op, value } = &x.kind {
                    push_assign(target, *op, value, x.span.start);
                }
            });
        }
        if let StmtKind::Expr(e) = &s.kind {
            if let ExprKind::MethodCall { .. } = &e.kind {
                if let Some((n, is_this)) = target_name(e.chain_root()) {
                    if is_this || !is_shadowed(n) {
                        if let Some(d) = fields.get_mut(n) {
                            d.invocations.push(Invocation {
                                call: e.clone(),
                                pos: s.span.start,
                            });
                        }
                    }
                }
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::parse_unit;

    fn scope_of(src: &str, method: &str) -> (SourceUnit, Scope) {
        let u = parse_unit(src, "S.java");
        assert!(u.parse_errors.is_empty(), "{:?}", u.parse_errors);
        let ty = &u.types[0];
        let m = ty.methods.iter().find(|m| m.name == method).unwrap();
        let s = build_scope(m, ty);
        (u, s)
    }

    #[test]
    fn assignments_are_ordered() {
        let (_, s) = scope_of(r#"class A { void m() { String s = "a"; s = s + "b"; } }"#, "m");
        let d = s.lookup("s").unwrap();
        assert_eq!(d.assignments.len(), 2);
        assert!(d.assignments[0].pos < d.assignments[1].pos);
        assert_eq!(d.assignments[0].value.as_str_literal(), Some("a"));
        assert!(matches!(d.assignments[1].value.kind, ExprKind::Concat(..)));
    }

    #[test]
    fn unassigned_int_local() {
        let (_, s) = scope_of("class A { void m() { int n; } }", "m");
        let d = s.lookup("n").unwrap();
        assert_eq!(d.declared_type, DeclaredType::NumberInt);
        assert!(d.assignments.is_empty());
    }

    #[test]
    fn field_resolution_and_shadowing() {
        let src = r#"class A {
            String base = "http://f";
            String other = "o";
            void m() { String base = "http://local"; use(base); use(other); }
            void n() { use(base); }
        }"#;
        let (u, s) = scope_of(src, "m");
        let d = s.lookup("base").unwrap();
        assert_eq!(d.kind, DeclKind::Local);
        assert_eq!(d.assignments[0].value.as_str_literal(), Some("http://local"));
        assert_eq!(s.lookup("other").unwrap().kind, DeclKind::Field);
        assert_eq!(s.lookup_field("base").unwrap().kind, DeclKind::Field);

        let ty = &u.types[0];
        let s2 = build_scope(&ty.methods[1], ty);
        let d = s2.lookup("base").unwrap();
        assert_eq!(d.kind, DeclKind::Field);
        assert_eq!(d.assignments[0].value.as_str_literal(), Some("http://f"));
    }

    #[test]
    fn constructor_assignments_reach_fields() {
        let src = r#"class A {
            private String url;
            A() { this.url = "http://ctor"; }
            void m() { go(url); }
        }"#;
        let (u, s) = scope_of(src, "m");
        let d = s.lookup("url").unwrap();
        assert_eq!(d.assignments.len(), 1);
        let use_pos = u.types[0].methods[1].span.start + 10;
        let a = s.reaching_assignment(d, use_pos).unwrap();
        assert_eq!(a.value.as_str_literal(), Some("http://ctor"));
    }

    #[test]
    fn builder_invocations_recorded() {
        let (_, s) = scope_of(
            r#"class A { void m() { StringBuilder sb = new StringBuilder("a"); sb.append("b").append("c"); sb.append(1); } }"#,
            "m",
        );
        let d = s.lookup("sb").unwrap();
        assert_eq!(d.invocations.len(), 2);
    }

    #[test]
    fn reaching_assignment_is_last_before_use() {
        let src = r#"class A { void m() { String s = "a"; s = "b"; use(s); s = "c"; } }"#;
        let (u, s) = scope_of(src, "m");
        let text_pos = src.find("use(s)").unwrap();
        let d = s.lookup("s").unwrap();
        assert_eq!(
            s.reaching_assignment(d, text_pos).unwrap().value.as_str_literal(),
            Some("b")
        );
        let _ = u;
    }
}
